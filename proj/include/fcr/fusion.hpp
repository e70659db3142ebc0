#pragma once

#include <span>
#include <vector>

#include "fcr/ranking.hpp"

namespace fcr {

struct RrfConfig {
  double k_rrf = 60.0;
  /// One positive weight per input ranking; empty means all 1.
  std::vector<double> weights;
};

/// Reciprocal Rank Fusion: score(d) = sum_i w_i / (k_rrf + rank_i(d)) with
/// 1-based ranks, lists lacking d contributing nothing. The output holds the
/// union of the input ids, sorted by the global tie rule.
///
/// Contributions are summed in ascending order of magnitude, so permuting the
/// inputs (together with their weights) reproduces the same bits.
Ranking rrf_fuse(std::span<const Ranking> rankings, const RrfConfig& config = {});

/// Fuses whole run files query by query. Queries are matched by id and keep
/// their order of first appearance; a query absent from a run is fused from
/// the runs that have it.
std::vector<Ranking> rrf_fuse_runs(std::span<const std::vector<Ranking>> runs,
                                   const RrfConfig& config = {});

}  // namespace fcr
