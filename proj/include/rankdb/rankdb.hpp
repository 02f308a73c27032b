#pragma once

#include "rankdb/algebra.hpp"
#include "rankdb/calculus.hpp"
#include "rankdb/condition.hpp"
#include "rankdb/config.hpp"
#include "rankdb/csv.hpp"
#include "rankdb/error.hpp"
#include "rankdb/expr.hpp"
#include "rankdb/order_map.hpp"
#include "rankdb/ordinal.hpp"
#include "rankdb/planner.hpp"
#include "rankdb/query_parser.hpp"
#include "rankdb/rational.hpp"
#include "rankdb/score_chain.hpp"
#include "rankdb/table.hpp"
#include "rankdb/topk.hpp"
