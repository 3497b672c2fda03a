#pragma once

// Randomized property checks shared by the unit tests and the acceptance
// runner. Each returns counts so callers can both assert and report.

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fcc/common/error.hpp"
#include "fcc/monitor/detectors.hpp"
#include "fcc/monitor/monitor.hpp"
#include "fcc/orchestrate/engine.hpp"
#include "oracles.hpp"

#ifndef FCC_FIXTURE_DIR
#error "FCC_FIXTURE_DIR must point at tests/fixtures"
#endif

namespace props {

using fcc::monitor::Alert;
using fcc::monitor::AlertType;

inline std::filesystem::path golden_dir() { return std::filesystem::path(FCC_FIXTURE_DIR) / "golden"; }

inline std::vector<fcc::ingest::TradeEvent> read_stream(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  auto parsed = fcc::ingest::read_trade_events(in);
  if (!parsed.failures.empty()) throw std::runtime_error("fixture has unreadable lines: " + path.string());
  return parsed.events;
}

inline std::vector<fcc::screening::RegistryEntry> golden_registry() {
  return fcc::screening::read_wallet_registry_file(golden_dir() / "registry.jsonl");
}

/// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng{std::random_device{}()};
    path = std::filesystem::temp_directory_path() / ("fcc-" + tag + "-" + std::to_string(rng()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

// ---- detectors ------------------------------------------------------------

struct DetectorReport {
  std::size_t streams = 0;
  std::map<std::string, std::size_t> discrepancies;  // by detector, plus "monitor"
  std::map<std::string, std::size_t> fired;          // oracle firings, to show coverage
  std::vector<std::string> examples;

  std::size_t total_discrepancies() const {
    std::size_t n = 0;
    for (const auto& [k, v] : discrepancies) n += v;
    return n;
  }
};

inline bool same(const std::optional<Alert>& got, const std::optional<oracle::Expected>& want,
                 const fcc::ingest::TradeEvent& trade) {
  if (got.has_value() != want.has_value()) return false;
  if (!got) return true;
  return oracle::expected_of(*got) == *want && got->raised_at == trade.timestamp && got->trigger_tx == trade.tx_id;
}

inline DetectorReport detector_property(std::uint64_t seed, std::size_t streams) {
  using namespace fcc;
  DetectorReport rep;
  for (const char* name : {"new_wallet", "wash_trading", "structuring", "velocity", "obfuscation", "sanctions",
                           "jurisdiction", "monitor"}) {
    rep.discrepancies[name] = 0;
    rep.fired[name] = 0;
  }
  std::mt19937_64 rng(seed);
  auto note = [&rep](const std::string& name, std::size_t stream, std::size_t t) {
    ++rep.discrepancies[name];
    if (rep.examples.size() < 10) {
      rep.examples.push_back(name + " stream " + std::to_string(stream) + " trade " + std::to_string(t));
    }
  };

  for (std::size_t k = 0; k < streams; ++k) {
    const oracle::StreamSpec s = oracle::random_stream(rng);
    ++rep.streams;
    for (std::size_t t = 0; t < s.events.size(); ++t) {
      const auto& trade = s.events[t];
      const std::vector<ingest::TradeEvent> prefix(s.events.begin(), s.events.begin() + static_cast<long>(t) + 1);
      auto filtered = [&prefix](auto pred) {
        std::vector<ingest::TradeEvent> out;
        for (const auto& e : prefix) {
          if (pred(e)) out.push_back(e);
        }
        return out;
      };
      std::vector<std::string> parties{trade.seller};
      if (trade.buyer != trade.seller) parties.push_back(trade.buyer);

      for (const auto& w : parties) {
        screening::WalletProfile p = screening::fresh_profile(w, oracle::first_seen(s, t, w));
        p.jurisdiction = oracle::jurisdiction(s, w);
        const auto screened = screening::screen_wallet(w, &p, s.lists);
        const auto mine = filtered([&w](const ingest::TradeEvent& e) { return e.involves(w); });

        auto check = [&](const char* name, std::optional<Alert> got, std::optional<oracle::Expected> want) {
          if (want) ++rep.fired[name];
          if (!same(got, want, trade)) note(name, k, t);
        };
        check("new_wallet", monitor::detect_new_wallet(p, trade, s.cfg), oracle::new_wallet(s, t, w));
        check("structuring", monitor::detect_structuring(w, mine, s.cfg), oracle::structuring(s, t, w));
        check("velocity", monitor::detect_velocity(w, mine, s.cfg), oracle::velocity(s, t, w));
        check("sanctions", monitor::detect_sanctions(p, trade, screened, s.cfg), oracle::sanctions(s, t, w));
        check("jurisdiction", monitor::detect_jurisdiction(p, trade, screened, s.cfg),
              oracle::high_risk_jurisdiction(s, t, w));
      }

      if (trade.buyer != trade.seller) {
        const auto pair = filtered([&trade](const ingest::TradeEvent& e) {
          return (e.seller == trade.seller && e.buyer == trade.buyer) ||
                 (e.seller == trade.buyer && e.buyer == trade.seller);
        });
        const auto got = monitor::detect_wash_trading(pair, s.cfg);
        const auto want = oracle::wash(s, t);
        if (!want.empty()) ++rep.fired["wash_trading"];
        bool ok = got.size() == want.size();
        for (std::size_t i = 0; ok && i < got.size(); ++i) ok = same(got[i], want[i], trade);
        if (!ok) note("wash_trading", k, t);
      } else if (!oracle::wash(s, t).empty()) {
        note("wash_trading", k, t);
      }

      const auto item = filtered([&trade](const ingest::TradeEvent& e) {
        return e.collection_id == trade.collection_id && e.item_id == trade.item_id;
      });
      const auto want_obf = oracle::obfuscation(s, t);
      if (want_obf) ++rep.fired["obfuscation"];
      if (!same(monitor::detect_obfuscation(item, s.cfg), want_obf, trade)) note("obfuscation", k, t);
    }

    // Whole-monitor check: indexes, windows and duplicate suppression.
    monitor::Monitor m(s.cfg, s.lists);
    for (const auto& r : s.registry) m.seed_wallet(r);
    for (const auto& e : s.events) m.process(e);
    const auto want = oracle::alert_log(s);
    rep.fired["monitor"] += want.size();
    bool ok = m.alerts().size() == want.size();
    for (std::size_t i = 0; ok && i < want.size(); ++i) {
      ok = oracle::expected_of(m.alerts()[i]) == want[i] && m.alerts()[i].alert_id == monitor::format_alert_id(i + 1);
    }
    if (!ok) note("monitor", k, s.events.size());
  }
  return rep;
}

// ---- optimizer ------------------------------------------------------------

struct OptimizerReport {
  std::size_t histories = 0;
  std::size_t mismatches = 0;
  std::size_t ties = 0;  // histories whose minimum is attained at more than one grid point
  std::vector<std::string> examples;
};

inline OptimizerReport optimizer_property(std::uint64_t seed, std::size_t histories) {
  using namespace fcc::investigate;
  OptimizerReport rep;
  std::mt19937_64 rng(seed);
  const int steps[] = {1, 2, 4, 5, 10, 20, 25, 50};
  for (std::size_t k = 0; k < histories; ++k) {
    OptimizerState st;
    st.grid_step = steps[rng() % std::size(steps)];
    st.theta = st.grid_step * static_cast<int>(rng() % (100 / st.grid_step + 1));
    st.c_fn = fcc::Decimal::from_micros(static_cast<std::int64_t>(1 + rng() % 10'000'000));
    st.c_fp = fcc::Decimal::from_micros(static_cast<std::int64_t>(1 + rng() % 10'000'000));
    if (rng() % 4 == 0) st.c_fp = st.c_fn;
    st.history_window = 1 + rng() % 80;
    std::vector<FeedbackRecord> h(rng() % 100);
    const bool coarse = rng() % 2 == 0;  // few distinct scores: many ties
    for (std::size_t i = 0; i < h.size(); ++i) {
      h[i].case_id = "CASE-" + std::to_string(i);
      h[i].case_score = coarse ? 10 * static_cast<int>(rng() % 11) : static_cast<int>(rng() % 101);
      h[i].analyst_label = rng() % 2 == 0 ? AnalystLabel::ConfirmedSuspicious : AnalystLabel::FalsePositive;
    }
    ++rep.histories;

    const auto want = oracle::best_threshold(h, st);
    const ThresholdResult got = optimize_threshold(h, st);
    const bool ok = got.theta_after == want.theta && oracle::rat(got.cost_after) == want.cost &&
                    got.theta_before == st.theta;
    if (!ok) {
      ++rep.mismatches;
      if (rep.examples.size() < 10) {
        rep.examples.push_back("history " + std::to_string(k) + ": got " + std::to_string(got.theta_after) +
                               " want " + std::to_string(want.theta));
      }
    }
    if (!h.empty()) {
      std::vector<FeedbackRecord> used = h;
      if (used.size() > st.history_window) used.erase(used.begin(), used.end() - static_cast<long>(st.history_window));
      int minimisers = 0;
      for (int theta = 0; theta <= 100; theta += st.grid_step) {
        minimisers += oracle::cost_at(used, theta, st) == want.cost ? 1 : 0;
      }
      rep.ties += minimisers > 1 ? 1 : 0;
    }
  }
  return rep;
}

// ---- governance -----------------------------------------------------------

struct GovernanceReport {
  std::size_t runs = 0;
  std::size_t cases = 0;
  std::size_t submitted = 0;
  std::size_t blocks = 0;          // GUARDRAIL_BLOCK records
  std::size_t probe_blocks = 0;    // blocked request_action probes
  std::size_t transitions = 0;
  std::vector<std::string> violations;
};

inline fcc::orchestrate::PolicySet random_policies(std::mt19937_64& rng) {
  using namespace fcc::orchestrate;
  PolicySet set = PolicySet::defaults();
  if (rng() % 3 == 0) return set;
  for (auto agent : fcc::kAllAgents) {
    GuardrailPolicy p = *set.find(agent);
    if (rng() % 6 == 0 && !p.allowed_actions.empty()) {
      auto it = p.allowed_actions.begin();
      std::advance(it, static_cast<long>(rng() % p.allowed_actions.size()));
      p.allowed_actions.erase(it);
    }
    if (rng() % 8 == 0) p.data_scopes.clear();
    if (rng() % 4 == 0) p.max_auto_band = static_cast<fcc::monitor::RiskBand>(rng() % 4);
    set.set(p);
  }
  return set;
}

/// Checks the structural invariants of an engine's cases against its audit log.
inline void check_governance(const fcc::orchestrate::Engine& eng, GovernanceReport& rep, const std::string& where) {
  using namespace fcc::orchestrate;
  const auto& records = eng.audit().records();
  auto fail = [&](const std::string& what) {
    if (rep.violations.size() < 20) rep.violations.push_back(where + ": " + what);
  };
  std::map<std::string, std::vector<const fcc::audit::AuditRecord*>> by_case;
  for (const auto& r : records) {
    if (r.case_id) by_case[*r.case_id].push_back(&r);
  }
  for (const auto& [id, c] : eng.cases()) {
    ++rep.cases;
    const auto& mine = by_case[id];
    // Every transition has exactly one TRANSITION record, and vice versa.
    std::size_t transition_records = 0;
    for (const auto* r : mine) transition_records += r->action == "TRANSITION" ? 1 : 0;
    if (transition_records + 1 != c.history.size()) fail(id + " transition/record count mismatch");
    for (std::size_t i = 1; i < c.history.size(); ++i) {
      ++rep.transitions;
      const auto seq = c.history[i].audit_seq;
      if (seq >= records.size()) {
        fail(id + " history points past the log");
        continue;
      }
      const auto& r = records[seq];
      const std::string prefix = std::string(to_string(c.history[i - 1].state)) + " -> " +
                                 std::string(to_string(c.history[i].state)) + " on ";
      if (r.action != "TRANSITION" || r.case_id != id || r.rationale.rfind(prefix, 0) != 0) {
        fail(id + " history entry " + std::to_string(i) + " not backed by its TRANSITION record");
      }
    }
    if (c.history.empty() || c.history.back().state != c.state) fail(id + " state differs from history");

    // SUBMITTED only behind an acknowledged human handover with a confirm.
    if (c.state == CaseState::Submitted) {
      ++rep.submitted;
      bool backed = false;
      for (const auto& [hid, h] : eng.handovers()) {
        backed = backed || (h.case_id == id && h.to_human() && h.acknowledged && h.decision &&
                            h.decision->decision == "confirm");
      }
      if (!backed) fail(id + " SUBMITTED without an acknowledged human confirm");
      std::optional<std::uint64_t> decided;
      for (const auto* r : mine) {
        if (r->action == "DECIDE_CASE" && !decided) decided = r->seq;
      }
      if (!decided || *decided > c.history.back().audit_seq) fail(id + " SUBMITTED before the decision was audited");
    }

    // A block parks the case: no agent action on it is recorded afterwards.
    for (const auto* r : mine) {
      if (r->action != "GUARDRAIL_BLOCK" || r->rationale.find("case parked") == std::string::npos) continue;
      ++rep.blocks;
      if (c.history.back().audit_seq > r->seq) fail(id + " state changed after a block");
      for (const auto* later : mine) {
        if (later->seq > r->seq && later->action != "GUARDRAIL_BLOCK" && later->action != "GUARDRAIL_CHECK" &&
            later->action != "DECIDE_CASE" && later->action != "RECORD_FEEDBACK") {
          fail(id + " " + later->action + " recorded after a block");
          break;
        }
      }
    }
  }
}

inline GovernanceReport governance_property(std::uint64_t seed, std::size_t runs) {
  using namespace fcc;
  using namespace fcc::orchestrate;
  GovernanceReport rep;
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < runs; ++k) {
    ++rep.runs;
    const std::string where = "run " + std::to_string(k);
    oracle::StreamSpec s = oracle::random_stream(rng, 60);
    EngineConfig cfg;
    cfg.ruleset = s.cfg;
    cfg.lists = s.lists;
    cfg.policies = random_policies(rng);
    cfg.optimizer.theta = 5 * static_cast<int>(rng() % 21);
    cfg.optimizer.auto_every = rng() % 4;
    Engine eng(cfg);
    eng.seed_wallets(s.registry);

    // Several batches interleaved with decisions and agent probes.
    std::size_t pos = 0;
    std::size_t decisions = 0;
    while (pos < s.events.size()) {
      const std::size_t len = 1 + rng() % (s.events.size() - pos);
      eng.run_pipeline(std::span(s.events).subspan(pos, len), "req-" + std::to_string(k) + "-" + std::to_string(pos));
      pos += len;

      for (const auto* h : eng.pending_escalations()) {
        if (rng() % 3 == 0) continue;
        const std::string hid = h->handover_id;
        const bool pending = eng.find_case(h->case_id)->state == CaseState::PendingReview;
        const std::string choice = rng() % 2 == 0 ? "confirm" : "dismiss";
        try {
          eng.decide(hid, choice, "reviewed evidence", "analyst-1", s.events[pos - 1].timestamp);
          ++decisions;
          if (!pending) rep.violations.push_back(where + ": decided a handover whose case was not pending");
        } catch (const Error& e) {
          if (pending || e.code() != ErrorCode::NotPending) {
            rep.violations.push_back(where + ": unexpected " + std::string(to_string(e.code())));
          }
        }
        try {
          eng.decide(hid, choice, "second attempt", "analyst-2", s.events[pos - 1].timestamp);
          rep.violations.push_back(where + ": a second decision was accepted");
        } catch (const Error& e) {
          if (e.code() != ErrorCode::NotPending) rep.violations.push_back(where + ": second decision gave wrong error");
        }
      }

      // Agent probes: a blocked request must not change anything but the log.
      if (!eng.cases().empty()) {
        auto it = eng.cases().begin();
        std::advance(it, static_cast<long>(rng() % eng.cases().size()));
        const std::string case_id = it->first;
        const AgentId agent = kAllAgents[rng() % kAllAgents.size()];
        static const char* kActions[] = {"SUBMIT_STR", "DECIDE_CASE", "DRAFT_STR", "READ_CASE", "CACHE_WRITE",
                                         "TRANSITION", "INGEST_BATCH", "DELETE_CASE"};
        const std::string act = kActions[rng() % std::size(kActions)];
        const std::string digest = eng.state_digest();
        const auto handovers = eng.handovers();
        const std::size_t log_size = eng.audit().size();
        const auto d = eng.request_action(agent, act, case_id, s.events[pos - 1].timestamp);
        if (d.verdict == Verdict::Block) ++rep.probe_blocks;
        if (eng.state_digest() != digest || eng.handovers() != handovers || eng.audit().size() != log_size + 1) {
          rep.violations.push_back(where + ": probe " + act + " changed state");
        }
        if ((act == "SUBMIT_STR" || act == "DECIDE_CASE") && d.verdict != Verdict::RequireHandover) {
          rep.violations.push_back(where + ": human-reserved " + act + " not handed to a human");
        }
      }
    }
    if (eng.audit().verify()) rep.violations.push_back(where + ": audit chain broken");
    check_governance(eng, rep, where);
    (void)decisions;
  }
  return rep;
}

}  // namespace props
