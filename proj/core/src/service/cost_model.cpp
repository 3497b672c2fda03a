#include "fcc/service/cost_model.hpp"

#include <nlohmann/json.hpp>

#include <cctype>

#include "fcc/common/error.hpp"

namespace fcc::service {
namespace {

using boost::multiprecision::cpp_int;

cpp_int parse_digits(std::string_view digits, std::string_view field) {
  if (digits.empty() || digits.size() > 60) throw Error(ErrorCode::InvalidParams, std::string(field));
  cpp_int out = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) throw Error(ErrorCode::InvalidParams, std::string(field));
    out = out * 10 + (c - '0');
  }
  return out;
}

Rational parse_decimal(std::string_view text, std::string_view field) {
  const auto dot = text.find('.');
  if (dot == std::string_view::npos) return Rational(parse_digits(text, field));
  const std::string_view whole = text.substr(0, dot);
  const std::string_view frac = text.substr(dot + 1);
  cpp_int scale = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
  cpp_int w = whole.empty() ? cpp_int(0) : parse_digits(whole, field);
  return Rational(w * scale + parse_digits(frac, field), scale);
}

std::string plain(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

}  // namespace

Rational parse_rational(std::string_view text, std::string_view field) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text, field);
  const Rational den = parse_decimal(text.substr(slash + 1), field);
  if (den == 0) throw Error(ErrorCode::InvalidParams, std::string(field));
  return parse_decimal(text.substr(0, slash), field) / den;
}

std::string format_rational(const Rational& value, int places) {
  cpp_int scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  const bool negative = value < 0;
  const Rational mag = negative ? Rational(-value) : value;
  const cpp_int num = boost::multiprecision::numerator(mag) * scale;
  const cpp_int den = boost::multiprecision::denominator(mag);
  const cpp_int scaled = (2 * num + den) / (2 * den);  // half up
  std::string digits = cpp_int(scaled / scale).str();
  std::string frac = cpp_int(scaled % scale).str();
  std::string out = negative && scaled != 0 ? "-" + digits : digits;
  if (places > 0) {
    frac.insert(0, static_cast<std::size_t>(places) - frac.size(), '0');
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    if (!frac.empty()) out += "." + frac;
  }
  return out;
}

void CostModelParams::validate() const {
  const std::pair<const Rational*, const char*> fields[] = {
      {&users, "U"}, {&tx_per_user, "R"}, {&suspicion_rate, "s"}, {&manual_hours_per_alert, "h"},
      {&fte_hours_per_year, "Y"}, {&api_calls_per_alert, "k"}, {&usd_per_call, "p"},
      {&automated_seconds_per_case, "automated_seconds"},
  };
  for (const auto& [value, name] : fields) {
    if (*value < 0) throw Error(ErrorCode::InvalidParams, name);
  }
  if (suspicion_rate > 1) throw Error(ErrorCode::InvalidParams, "s");
  if (fte_hours_per_year == 0) throw Error(ErrorCode::InvalidParams, "Y");
  if (manual_hours_per_alert == 0) throw Error(ErrorCode::InvalidParams, "h");
}

CostModelParams CostModelParams::from_strings(const std::map<std::string, std::string>& values,
                                              CostModelParams defaults) {
  CostModelParams p = std::move(defaults);
  const std::pair<const char*, Rational*> fields[] = {
      {"U", &p.users}, {"R", &p.tx_per_user}, {"s", &p.suspicion_rate}, {"h", &p.manual_hours_per_alert},
      {"Y", &p.fte_hours_per_year}, {"k", &p.api_calls_per_alert}, {"p", &p.usd_per_call},
      {"automated_seconds", &p.automated_seconds_per_case},
  };
  for (const auto& [key, value] : values) {
    bool known = false;
    for (const auto& [name, target] : fields) {
      if (key == name) {
        *target = parse_rational(value, key);
        known = true;
      }
    }
    if (!known) throw Error(ErrorCode::InvalidParams, key);
  }
  p.validate();
  return p;
}

nlohmann::json CostModelParams::to_json() const {
  return {
      {"U", plain(users)}, {"R", plain(tx_per_user)}, {"s", plain(suspicion_rate)},
      {"h", plain(manual_hours_per_alert)}, {"Y", plain(fte_hours_per_year)}, {"k", plain(api_calls_per_alert)},
      {"p", plain(usd_per_call)}, {"automated_seconds", plain(automated_seconds_per_case)},
  };
}

CostReport compute_cost_report(const CostModelParams& params) {
  params.validate();
  CostReport r;
  r.alerts_per_year = params.users * params.tx_per_user * params.suspicion_rate;
  r.manual_hours = r.alerts_per_year * params.manual_hours_per_alert;
  r.manual_fte = r.manual_hours / params.fte_hours_per_year;
  r.inference_cost_usd = r.alerts_per_year * params.api_calls_per_alert * params.usd_per_call;
  Rational reduction = 1 - params.automated_seconds_per_case / (params.manual_hours_per_alert * 3600);
  r.reduction_fraction = reduction < 0 ? Rational(0) : reduction;
  return r;
}

nlohmann::json CostReport::to_json() const {
  return {
      {"alerts_per_year", format_rational(alerts_per_year, 6)},
      {"manual_hours", format_rational(manual_hours, 6)},
      {"manual_fte", format_rational(manual_fte, 6)},
      {"inference_cost_usd", format_rational(inference_cost_usd, 2)},
      {"reduction_fraction", format_rational(reduction_fraction, 6)},
      {"exact",
       {{"alerts_per_year", plain(alerts_per_year)},
        {"manual_hours", plain(manual_hours)},
        {"manual_fte", plain(manual_fte)},
        {"inference_cost_usd", plain(inference_cost_usd)},
        {"reduction_fraction", plain(reduction_fraction)}}},
  };
}

}  // namespace fcc::service
