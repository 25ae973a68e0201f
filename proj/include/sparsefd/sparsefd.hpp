#pragma once

#include "sparsefd/bench.hpp"
#include "sparsefd/covariance.hpp"
#include "sparsefd/dataset.hpp"
#include "sparsefd/error.hpp"
#include "sparsefd/eval.hpp"
#include "sparsefd/factorize.hpp"
#include "sparsefd/fdgen.hpp"
#include "sparsefd/glasso.hpp"
#include "sparsefd/pipeline.hpp"
#include "sparsefd/synth.hpp"
#include "sparsefd/transform.hpp"
