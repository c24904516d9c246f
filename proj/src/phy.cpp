#include "uljam/phy.hpp"

namespace uljam {

std::set<uint32_t> pucch_region(uint32_t total_rbs, uint32_t edge_rbs)
{
  if (edge_rbs == 0) {
    throw std::invalid_argument("pucch_region: edge_rbs must be positive");
  }
  if (2 * edge_rbs >= total_rbs) {
    throw std::invalid_argument("pucch_region: edge regions would cover the whole band");
  }
  std::set<uint32_t> region;
  for (uint32_t i = 0; i < edge_rbs; ++i) {
    region.insert(i);
    region.insert(total_rbs - 1 - i);
  }
  return region;
}

PowerDb effective_sinr(const LinkBudget& budget, PowerDb jammer_gain_db, bool jammed)
{
  if (!jammed) {
    return budget.ue_signal_db - budget.noise_floor_db;
  }
  const double interference = db_to_linear(budget.jammer_base_db + jammer_gain_db) +
                              db_to_linear(budget.noise_floor_db);
  return budget.ue_signal_db - linear_to_db(interference);
}

} // namespace uljam
