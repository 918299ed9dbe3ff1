#pragma once

#include <gtest/gtest.h>

#include "graspsim/contact/world.hpp"

// Fails the binary if any simulated step in any test left the friction cone.
class ConeGuard : public ::testing::Environment {
 public:
  void TearDown() override { EXPECT_EQ(graspsim::contact::total_cone_violations(), 0); }
};

inline const auto* const kConeGuard = ::testing::AddGlobalTestEnvironment(new ConeGuard);
