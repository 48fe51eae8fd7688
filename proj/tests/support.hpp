#pragma once

#include <map>
#include <mutex>
#include <string>

#include "qhd/pipeline.hpp"

namespace qhd::test {

// Profiles are deterministic; shoot each preset once per binary.
inline const ProfileSolution& preset_profile(const std::string& name) {
  static std::map<std::string, ProfileSolution> cache;
  static std::mutex m;
  std::lock_guard lock(m);
  auto it = cache.find(name);
  if (it == cache.end()) {
    const RunConfig c = preset(name);
    it = cache.emplace(name, shoot_profile(c.params, c.profile)).first;
  }
  return it->second;
}

inline ShockParams sec53() { return preset("sec53").params; }
inline ShockParams fig1a() { return preset("fig1a").params; }
inline ShockParams fig1b() { return preset("fig1b").params; }

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace qhd::test
