// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "krylov/core/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace krylov
{

namespace
{

std::string lower(std::string s)
{
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool blank_or_comment(const std::string &line)
{
  for (char c : line)
  {
    if (c == '%')
    {
      return true;
    }
    if (!std::isspace(static_cast<unsigned char>(c)))
    {
      return false;
    }
  }
  return true;
}

}  // namespace

CsrMatrix<double> mm_read(std::istream &in)
{
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line))
  {
    throw ParseError("empty Matrix Market input", 1);
  }
  lineno++;
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket")
  {
    throw ParseError("missing %%MatrixMarket banner", lineno);
  }
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix" || format != "coordinate")
  {
    throw ParseError("only 'matrix coordinate' files are supported", lineno);
  }
  if (field != "real" && field != "double" && field != "integer")
  {
    throw ParseError("unsupported field type '" + field + "'", lineno);
  }
  if (symmetry != "general" && symmetry != "symmetric")
  {
    throw ParseError("unsupported symmetry '" + symmetry + "'", lineno);
  }
  const bool symmetric = symmetry == "symmetric";

  long long nrows = -1, ncols = -1, nnz = -1;
  while (std::getline(in, line))
  {
    lineno++;
    if (blank_or_comment(line))
    {
      continue;
    }
    std::istringstream size_line(line);
    std::string extra;
    if (!(size_line >> nrows >> ncols >> nnz) || (size_line >> extra) || nrows < 0 ||
        ncols < 0 || nnz < 0)
    {
      throw ParseError("malformed size line", lineno);
    }
    break;
  }
  if (nrows < 0)
  {
    throw ParseError("missing size line", lineno);
  }
  if (symmetric && nrows != ncols)
  {
    throw ParseError("symmetric matrix must be square", lineno);
  }

  std::vector<Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(symmetric ? 2 * nnz : nnz));
  long long seen = 0;
  while (seen < nnz && std::getline(in, line))
  {
    lineno++;
    if (blank_or_comment(line))
    {
      continue;
    }
    std::istringstream entry(line);
    long long i = 0, j = 0;
    double v = 0.0;
    std::string extra;
    if (!(entry >> i >> j >> v) || (entry >> extra))
    {
      throw ParseError("malformed entry", lineno);
    }
    if (i < 1 || i > nrows || j < 1 || j > ncols)
    {
      throw ParseError("index out of range", lineno);
    }
    if (symmetric && j > i)
    {
      throw ParseError("symmetric file stores an upper-triangle entry", lineno);
    }
    const auto r = static_cast<std::size_t>(i - 1);
    const auto c = static_cast<std::size_t>(j - 1);
    entries.push_back({r, c, v});
    if (symmetric && r != c)
    {
      entries.push_back({c, r, v});
    }
    seen++;
  }
  if (seen != nnz)
  {
    throw ParseError("expected " + std::to_string(nnz) + " entries, found " +
                         std::to_string(seen),
                     lineno);
  }
  while (std::getline(in, line))
  {
    lineno++;
    if (!blank_or_comment(line))
    {
      throw ParseError("trailing data after last entry", lineno);
    }
  }
  try
  {
    return CsrMatrix<double>::from_triplets(static_cast<std::size_t>(nrows),
                                            static_cast<std::size_t>(ncols), std::move(entries));
  }
  catch (const DimensionError &e)
  {
    throw ParseError(e.what(), lineno);
  }
}

CsrMatrix<double> mm_read(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw KrylovError("cannot open " + path.string());
  }
  return mm_read(in);
}

void mm_write(std::ostream &out, const CsrMatrix<double> &A)
{
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << ' ' << A.cols() << ' ' << A.nnz() << '\n';
  char buf[64];
  const auto rp = A.row_ptr();
  const auto ci = A.col_idx();
  const auto va = A.values();
  for (std::size_t i = 0; i < A.rows(); i++)
  {
    for (std::size_t k = rp[i]; k < rp[i + 1]; k++)
    {
      std::snprintf(buf, sizeof(buf), "%.17g", va[k]);
      out << (i + 1) << ' ' << (ci[k] + 1) << ' ' << buf << '\n';
    }
  }
}

void mm_write(const std::filesystem::path &path, const CsrMatrix<double> &A)
{
  std::ofstream out(path);
  if (!out)
  {
    throw KrylovError("cannot open " + path.string() + " for writing");
  }
  mm_write(out, A);
  if (!out)
  {
    throw KrylovError("write failed for " + path.string());
  }
}

}  // namespace krylov
