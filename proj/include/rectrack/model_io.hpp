#pragma once

#include <cstdint>
#include <string>

#include "rectrack/assoc.hpp"
#include "rectrack/motion.hpp"

namespace rectrack {

void save_motion_net(const std::string& path, const MotionNet& net, std::uint64_t iteration);
MotionNet load_motion_net(const std::string& path);

void save_assoc_net(const std::string& path, const AssocNet& net, std::uint64_t iteration);
AssocNet load_assoc_net(const std::string& path);

}  // namespace rectrack
