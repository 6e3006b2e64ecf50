#pragma once

#include "bidfm/config.hpp"
#include "bidfm/detect.hpp"
#include "bidfm/errors.hpp"
#include "bidfm/experiments.hpp"
#include "bidfm/io.hpp"
#include "bidfm/kmeans.hpp"
#include "bidfm/linalg.hpp"
#include "bidfm/matrix.hpp"
#include "bidfm/membership.hpp"
#include "bidfm/metrics.hpp"
#include "bidfm/model.hpp"
#include "bidfm/rng.hpp"
#include "bidfm/sampling.hpp"
#include "bidfm/theory.hpp"
