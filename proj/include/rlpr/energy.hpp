#pragma once

#include <cstdint>

namespace rlpr {

enum class EnergyUse { Tx, Rx, Idle };

struct EnergyBudget {
  double residual = 0.0;          // J
  double tx_cost_per_bit = 50e-6; // J/bit
  double rx_cost_per_bit = 5e-6;  // J/bit
  double idle_drain = 0.0;        // W
  bool unlimited = false;         // mains-powered ground station
};

struct DebitResult {
  EnergyBudget budget;
  double drawn = 0.0;   // energy actually removed (<= requested, after the floor)
  bool died = false;    // this debit crossed zero for the first time
};

/// Requested cost of one debit: bits * per-bit cost for tx/rx, dt * drain for idle.
double energy_cost(const EnergyBudget& budget, EnergyUse use, std::uint64_t bits, double dt);

/// Removes the cost of `use` from the budget, flooring at zero. `died` is set
/// only on the debit that takes a positive residual to zero.
DebitResult debit_energy(const EnergyBudget& budget, EnergyUse use, std::uint64_t bits,
                         double dt);

}  // namespace rlpr
