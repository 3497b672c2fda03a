#pragma once

#include <map>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json_fwd.hpp>

namespace fcc::service {

using Rational = boost::multiprecision::cpp_rational;

/// Parses "12", "0.045" or "1/1666" exactly. Throws Error(InvalidParams)
/// naming `field`.
Rational parse_rational(std::string_view text, std::string_view field);
/// Half-up rounding to `places` decimals, trailing zeros trimmed.
std::string format_rational(const Rational& value, int places);

struct CostModelParams {
  Rational users;                          // U
  Rational tx_per_user;                    // R, per year
  Rational suspicion_rate;                 // s
  Rational manual_hours_per_alert{2};      // h
  Rational fte_hours_per_year{1875};       // Y
  Rational api_calls_per_alert{Rational(222, 100)};  // k
  Rational usd_per_call{Rational(1, 1666)};          // p
  Rational automated_seconds_per_case{60};

  /// Throws Error(InvalidParams).
  void validate() const;
  /// Keys U, R, s, h, Y, k, p, automated_seconds; absent keys keep defaults.
  static CostModelParams from_strings(const std::map<std::string, std::string>& values,
                                      CostModelParams defaults);
  nlohmann::json to_json() const;
};

struct CostReport {
  Rational alerts_per_year;
  Rational manual_hours;
  Rational manual_fte;
  Rational inference_cost_usd;
  Rational reduction_fraction;

  nlohmann::json to_json() const;
};

/// Exact rational arithmetic; throws Error(InvalidParams).
CostReport compute_cost_report(const CostModelParams& params);

}  // namespace fcc::service
