#pragma once

#include "rlpr/geometry.hpp"

namespace rlpr {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Friis free-space link budget. The transmit power is not a free parameter:
/// `calibrated()` solves for it so that rssi(max_range) == rssi_threshold.
struct RadioModel {
  double tx_power_dbm = 0.0;
  double carrier_freq_hz = 2.4e9;
  double max_range_m = 250.0;
  double rssi_threshold_dbm = -64.0;

  static RadioModel calibrated(double carrier_freq_hz, double max_range_m,
                               double rssi_threshold_dbm);

  /// Free-space path loss in dB at distance d (d > 0).
  double path_loss_db(double d) const;

  /// Received power in dBm at distance d. Throws std::domain_error for d <= 0.
  double rssi(double d) const;

  /// True iff a frame sent over distance d is receivable (d <= max_range).
  bool receivable(double d) const;
};

}  // namespace rlpr
