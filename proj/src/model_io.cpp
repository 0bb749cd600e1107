#include "rectrack/model_io.hpp"

#include <stdexcept>

#include "rectrack/checkpoint.hpp"

namespace rectrack {

void save_motion_net(const std::string& path, const MotionNet& net, std::uint64_t iteration) {
  std::vector<std::uint32_t> dims{static_cast<std::uint32_t>(net.hidden_size),
                                  static_cast<std::uint32_t>(net.update_hidden)};
  save_checkpoint(path, kCheckpointMotion, iteration, dims, net.params());
}

MotionNet load_motion_net(const std::string& path) {
  Checkpoint ckpt = load_checkpoint(path);
  if (ckpt.kind != kCheckpointMotion)
    throw std::runtime_error(path + ": not a motion net checkpoint");
  if (ckpt.dims.size() != 2) throw std::runtime_error(path + ": bad motion net dims");
  MotionNet net(static_cast<int>(ckpt.dims[0]), static_cast<int>(ckpt.dims[1]));
  restore_params(ckpt, net.params());
  return net;
}

void save_assoc_net(const std::string& path, const AssocNet& net, std::uint64_t iteration) {
  std::vector<std::uint32_t> dims{
      static_cast<std::uint32_t>(net.cfg.n_max), static_cast<std::uint32_t>(net.cfg.m_max),
      static_cast<std::uint32_t>(net.cfg.embed), static_cast<std::uint32_t>(net.cfg.hidden),
      static_cast<std::uint32_t>(net.cfg.layers)};
  save_checkpoint(path, kCheckpointAssoc, iteration, dims, net.params());
}

AssocNet load_assoc_net(const std::string& path) {
  Checkpoint ckpt = load_checkpoint(path);
  if (ckpt.kind != kCheckpointAssoc)
    throw std::runtime_error(path + ": not an association net checkpoint");
  if (ckpt.dims.size() != 5) throw std::runtime_error(path + ": bad association net dims");
  AssocConfig cfg;
  cfg.n_max = static_cast<int>(ckpt.dims[0]);
  cfg.m_max = static_cast<int>(ckpt.dims[1]);
  cfg.embed = static_cast<int>(ckpt.dims[2]);
  cfg.hidden = static_cast<int>(ckpt.dims[3]);
  cfg.layers = static_cast<int>(ckpt.dims[4]);
  AssocNet net(cfg);
  restore_params(ckpt, net.params());
  return net;
}

}  // namespace rectrack
