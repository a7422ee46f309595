#ifndef NDORDER_NDORDER_HPP_
#define NDORDER_NDORDER_HPP_

#include "ndorder/band.hpp"
#include "ndorder/coarsen.hpp"
#include "ndorder/common.hpp"
#include "ndorder/dist_graph.hpp"
#include "ndorder/eval.hpp"
#include "ndorder/fm.hpp"
#include "ndorder/generators.hpp"
#include "ndorder/graph.hpp"
#include "ndorder/io.hpp"
#include "ndorder/min_degree.hpp"
#include "ndorder/nested_dissection.hpp"
#include "ndorder/order_tree.hpp"
#include "ndorder/partition.hpp"
#include "ndorder/payload.hpp"
#include "ndorder/procsim.hpp"
#include "ndorder/separator.hpp"

#endif  // NDORDER_NDORDER_HPP_
