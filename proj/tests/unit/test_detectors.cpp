#include <gtest/gtest.h>

#include "properties.hpp"

// Every detector, and the monitor as a whole, is compared trade by trade
// with the brute-force oracles in oracles.hpp over random streams.

TEST(DetectorProperty, AgreesWithOraclesOnRandomStreams) {
  const props::DetectorReport rep = props::detector_property(20250301, 600);
  EXPECT_EQ(rep.streams, 600u);
  for (const auto& [name, n] : rep.discrepancies) EXPECT_EQ(n, 0u) << name;
  for (const auto& ex : rep.examples) ADD_FAILURE() << ex;
  // The generator has to exercise each rule, otherwise agreement says little.
  for (const auto& [name, n] : rep.fired) EXPECT_GT(n, 0u) << name << " never fired";
}

TEST(DetectorProperty, OtherSeed) {
  const props::DetectorReport rep = props::detector_property(7, 200);
  EXPECT_EQ(rep.total_discrepancies(), 0u);
}
