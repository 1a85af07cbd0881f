// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_ORTHO_SCHEME_HPP
#define KRYLOV_ORTHO_SCHEME_HPP

#include <optional>
#include <string>
#include <string_view>

namespace krylov
{

enum class OrthoScheme
{
  MGS,
  CGS,
  CGS2,
  CGSP,
  ICWY
};

inline std::string to_string(OrthoScheme s)
{
  switch (s)
  {
    case OrthoScheme::MGS:
      return "mgs";
    case OrthoScheme::CGS:
      return "cgs";
    case OrthoScheme::CGS2:
      return "cgs2";
    case OrthoScheme::CGSP:
      return "cgsp";
    case OrthoScheme::ICWY:
      return "icwy";
  }
  return "unknown";
}

inline std::optional<OrthoScheme> parse_scheme(std::string_view name)
{
  if (name == "mgs")
  {
    return OrthoScheme::MGS;
  }
  if (name == "cgs")
  {
    return OrthoScheme::CGS;
  }
  if (name == "cgs2")
  {
    return OrthoScheme::CGS2;
  }
  if (name == "cgsp")
  {
    return OrthoScheme::CGSP;
  }
  if (name == "icwy")
  {
    return OrthoScheme::ICWY;
  }
  return std::nullopt;
}

// Modeled global reductions for one Arnoldi step producing column j (1-based).
inline std::size_t modeled_step_reductions(OrthoScheme s, std::size_t j)
{
  switch (s)
  {
    case OrthoScheme::MGS:
      return j + 1;
    case OrthoScheme::CGS:
      return 2;
    case OrthoScheme::CGS2:
      return 3;
    case OrthoScheme::CGSP:
    case OrthoScheme::ICWY:
      return 1;
  }
  return 0;
}

}  // namespace krylov

#endif  // KRYLOV_ORTHO_SCHEME_HPP
