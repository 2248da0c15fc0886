#pragma once

#include "nfg/dynamics.hpp"

namespace nfg {

/// run_game with transfers forced on; the trace's ledger holds one-shot payments per live link.
[[nodiscard]] inline GameResult run_monetary_game(DynamicsConfig cfg, const GameParams& p) {
  cfg.transfers = true;
  return run_game(cfg, p);
}

/// Whether every link between two TypeA players carries no payment.
[[nodiscard]] inline bool core_links_settlement_free(const Topology& t, const PaymentLedger& ledger) {
  for (const auto& [key, amount] : ledger.transfers())
    if (t.type(key.first) == PlayerType::TypeA && t.type(key.second) == PlayerType::TypeA && amount.numerator() != 0) return false;
  return true;
}

}  // namespace nfg
