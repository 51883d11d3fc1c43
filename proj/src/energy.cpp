#include "rlpr/energy.hpp"

#include <algorithm>
#include <stdexcept>

namespace rlpr {

double energy_cost(const EnergyBudget& budget, EnergyUse use, std::uint64_t bits, double dt) {
  if (dt < 0.0) throw std::invalid_argument("energy: negative interval");
  switch (use) {
    case EnergyUse::Tx:
      return static_cast<double>(bits) * budget.tx_cost_per_bit;
    case EnergyUse::Rx:
      return static_cast<double>(bits) * budget.rx_cost_per_bit;
    case EnergyUse::Idle:
      return dt * budget.idle_drain;
  }
  return 0.0;
}

DebitResult debit_energy(const EnergyBudget& budget, EnergyUse use, std::uint64_t bits,
                         double dt) {
  DebitResult r{budget, 0.0, false};
  if (budget.unlimited) return r;
  const double cost = energy_cost(budget, use, bits, dt);
  if (budget.residual <= 0.0) {
    r.budget.residual = 0.0;
    return r;
  }
  r.drawn = std::min(cost, budget.residual);
  r.budget.residual = budget.residual - r.drawn;
  if (r.budget.residual <= 0.0) {
    r.budget.residual = 0.0;
    r.died = true;
  }
  return r;
}

}  // namespace rlpr
