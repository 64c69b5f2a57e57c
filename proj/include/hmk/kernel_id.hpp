#pragma once

#include <string>

#include "error.hpp"

namespace hmk {

enum class KernelId {
  Causal,          // whole-space commutator G
  Retarded,
  Advanced,
  Vacuum,          // whole-space two-point function
  Feynman,
  DirichletCausal,
  NeumannCausal,
  DirichletState,
  NeumannState,
  RobinCausal,
  RobinRetarded,
  RobinAdvanced,
  RobinState,
  RobinFeynman,
  Parametrix,
  Lkappa
};

struct KernelName {
  KernelId id;
  const char* name;
};

inline constexpr KernelName kKernelNames[] = {
    {KernelId::Causal, "causal"},
    {KernelId::Retarded, "retarded"},
    {KernelId::Advanced, "advanced"},
    {KernelId::Vacuum, "vacuum"},
    {KernelId::Feynman, "feynman"},
    {KernelId::DirichletCausal, "dirichlet-causal"},
    {KernelId::NeumannCausal, "neumann-causal"},
    {KernelId::DirichletState, "dirichlet-state"},
    {KernelId::NeumannState, "neumann-state"},
    {KernelId::RobinCausal, "robin-causal"},
    {KernelId::RobinRetarded, "robin-retarded"},
    {KernelId::RobinAdvanced, "robin-advanced"},
    {KernelId::RobinState, "robin-state"},
    {KernelId::RobinFeynman, "robin-feynman"},
    {KernelId::Parametrix, "parametrix"},
    {KernelId::Lkappa, "lkappa"},
};

inline std::string to_string(KernelId id) {
  for (const auto& k : kKernelNames)
    if (k.id == id) return k.name;
  return "unknown";
}

inline KernelId parse_kernel(const std::string& s) {
  for (const auto& k : kKernelNames)
    if (s == k.name) return k.id;
  throw Error(ErrorCode::Usage, "unknown kernel '" + s + "'");
}

inline bool is_robin(KernelId id) {
  return id == KernelId::RobinCausal || id == KernelId::RobinRetarded ||
         id == KernelId::RobinAdvanced || id == KernelId::RobinState ||
         id == KernelId::RobinFeynman || id == KernelId::Parametrix || id == KernelId::Lkappa;
}

}  // namespace hmk
