#pragma once

#include "semplan/alphabet.hpp"
#include "semplan/bench.hpp"
#include "semplan/dfa.hpp"
#include "semplan/error.hpp"
#include "semplan/executor.hpp"
#include "semplan/formula.hpp"
#include "semplan/io.hpp"
#include "semplan/model.hpp"
#include "semplan/parser.hpp"
#include "semplan/planner.hpp"
#include "semplan/product.hpp"
#include "semplan/render.hpp"
#include "semplan/scenario.hpp"
