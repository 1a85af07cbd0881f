// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_CORE_MATRIX_MARKET_HPP
#define KRYLOV_CORE_MATRIX_MARKET_HPP

#include <filesystem>
#include <iosfwd>

#include "krylov/core/csr.hpp"

namespace krylov
{

// Reads "coordinate real general" or "coordinate real symmetric" files. Symmetric storage
// is expanded to full. Duplicate entries are rejected. Throws ParseError with the offending
// line number.
CsrMatrix<double> mm_read(const std::filesystem::path &path);
CsrMatrix<double> mm_read(std::istream &in);

// Writes "coordinate real general" with %.17g values, so mm_read(mm_write(A)) == A.
void mm_write(const std::filesystem::path &path, const CsrMatrix<double> &A);
void mm_write(std::ostream &out, const CsrMatrix<double> &A);

}  // namespace krylov

#endif  // KRYLOV_CORE_MATRIX_MARKET_HPP
