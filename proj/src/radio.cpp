#include "rlpr/radio.hpp"

#include <cmath>
#include <stdexcept>

namespace rlpr {

namespace {

double fspl_db(double d, double freq) {
  return 20.0 * std::log10(4.0 * M_PI * d * freq / kSpeedOfLight);
}

}  // namespace

RadioModel RadioModel::calibrated(double carrier_freq_hz, double max_range_m,
                                  double rssi_threshold_dbm) {
  if (carrier_freq_hz <= 0.0 || max_range_m <= 0.0) {
    throw std::invalid_argument("radio: frequency and range must be positive");
  }
  RadioModel m;
  m.carrier_freq_hz = carrier_freq_hz;
  m.max_range_m = max_range_m;
  m.rssi_threshold_dbm = rssi_threshold_dbm;
  m.tx_power_dbm = rssi_threshold_dbm + fspl_db(max_range_m, carrier_freq_hz);
  return m;
}

double RadioModel::path_loss_db(double d) const {
  if (!(d > 0.0)) {
    throw std::domain_error("rssi: distance must be positive");
  }
  return fspl_db(d, carrier_freq_hz);
}

double RadioModel::rssi(double d) const { return tx_power_dbm - path_loss_db(d); }

bool RadioModel::receivable(double d) const {
  // Equivalent to rssi(d) >= threshold by monotonicity, without the rounding
  // hazard exactly at the calibrated edge.
  return d <= max_range_m;
}

}  // namespace rlpr
