#pragma once

#include <qnml/bench.hpp>
#include <qnml/dag.hpp>
#include <qnml/dataset.hpp>
#include <qnml/error.hpp>
#include <qnml/learner.hpp>
#include <qnml/model.hpp>
#include <qnml/network_io.hpp>
#include <qnml/nml_oracle.hpp>
#include <qnml/regret.hpp>
#include <qnml/scores.hpp>

namespace qnml {
inline constexpr const char* version = "0.1.0";
}
