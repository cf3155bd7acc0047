#pragma once

#include "qcl/basis.hpp"
#include "qcl/bigcount.hpp"
#include "qcl/enumerate.hpp"
#include "qcl/experiment.hpp"
#include "qcl/reduce.hpp"
#include "qcl/sample.hpp"
#include "qcl/series.hpp"
#include "qcl/term.hpp"
#include "qcl/types.hpp"
