// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "krylov/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "krylov/core/errors.hpp"

namespace krylov
{

namespace
{

using json = nlohmann::json;

// Line (1-based) of every value in a syntactically valid JSON text, keyed by JSON pointer.
class LineMap
{
public:
  explicit LineMap(const std::string &text) : text_(text) { value(""); }

  std::size_t line(const std::string &pointer) const
  {
    // Fall back to the closest enclosing value.
    std::string p = pointer;
    while (true)
    {
      const auto it = lines_.find(p);
      if (it != lines_.end())
      {
        return it->second;
      }
      const auto slash = p.rfind('/');
      if (slash == std::string::npos)
      {
        return 1;
      }
      p = p.substr(0, slash);
    }
  }

private:
  void skip_ws()
  {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
    {
      if (text_[pos_] == '\n')
      {
        line_++;
      }
      pos_++;
    }
  }

  std::string string()
  {
    std::string out;
    pos_++;
    while (pos_ < text_.size() && text_[pos_] != '"')
    {
      if (text_[pos_] == '\\')
      {
        pos_++;
      }
      out.push_back(text_[pos_]);
      pos_++;
    }
    pos_++;
    return out;
  }

  static std::string escape(const std::string &key)
  {
    std::string out;
    for (char c : key)
    {
      if (c == '~')
      {
        out += "~0";
      }
      else if (c == '/')
      {
        out += "~1";
      }
      else
      {
        out.push_back(c);
      }
    }
    return out;
  }

  void value(const std::string &pointer)
  {
    skip_ws();
    if (pos_ >= text_.size())
    {
      return;
    }
    lines_[pointer] = line_;
    const char c = text_[pos_];
    if (c == '{')
    {
      pos_++;
      skip_ws();
      while (pos_ < text_.size() && text_[pos_] != '}')
      {
        const std::string key = string();
        skip_ws();
        pos_++;  // ':'
        value(pointer + "/" + escape(key));
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ',')
        {
          pos_++;
          skip_ws();
        }
      }
      pos_++;
    }
    else if (c == '[')
    {
      pos_++;
      skip_ws();
      std::size_t index = 0;
      while (pos_ < text_.size() && text_[pos_] != ']')
      {
        value(pointer + "/" + std::to_string(index++));
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ',')
        {
          pos_++;
          skip_ws();
        }
      }
      pos_++;
    }
    else if (c == '"')
    {
      string();
    }
    else
    {
      while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '}' &&
             text_[pos_] != ']' && !std::isspace(static_cast<unsigned char>(text_[pos_])))
      {
        pos_++;
      }
    }
  }

  const std::string &text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::map<std::string, std::size_t> lines_;
};

class Reader
{
public:
  Reader(const LineMap &lines, std::filesystem::path base) : lines_(lines), base_(std::move(base))
  {
  }

  [[noreturn]] void fail(const std::string &pointer, const std::string &what) const
  {
    throw ParseError((pointer.empty() ? std::string("/") : pointer) + ": " + what,
                     lines_.line(pointer));
  }

  void only_keys(const json &obj, const std::string &pointer,
                 std::initializer_list<const char *> allowed) const
  {
    if (!obj.is_object())
    {
      fail(pointer, "expected an object");
    }
    for (const auto &item : obj.items())
    {
      if (std::none_of(allowed.begin(), allowed.end(),
                       [&](const char *k) { return item.key() == k; }))
      {
        fail(pointer + "/" + item.key(), "unknown key '" + item.key() + "'");
      }
    }
  }

  double number(const json &obj, const std::string &pointer, const char *key) const
  {
    const auto &v = obj.at(key);
    if (!v.is_number())
    {
      fail(pointer + "/" + key, "expected a number");
    }
    return v.get<double>();
  }

  std::size_t count(const json &obj, const std::string &pointer, const char *key) const
  {
    const auto &v = obj.at(key);
    if (!v.is_number_unsigned())
    {
      fail(pointer + "/" + key, "expected a non-negative integer");
    }
    return v.get<std::size_t>();
  }

  std::uint64_t seed(const json &obj, const std::string &pointer, const char *key) const
  {
    const auto &v = obj.at(key);
    if (!v.is_number_unsigned())
    {
      fail(pointer + "/" + key, "expected a non-negative integer seed");
    }
    return v.get<std::uint64_t>();
  }

  bool boolean(const json &obj, const std::string &pointer, const char *key) const
  {
    const auto &v = obj.at(key);
    if (!v.is_boolean())
    {
      fail(pointer + "/" + key, "expected true or false");
    }
    return v.get<bool>();
  }

  std::string text(const json &obj, const std::string &pointer, const char *key) const
  {
    const auto &v = obj.at(key);
    if (!v.is_string())
    {
      fail(pointer + "/" + key, "expected a string");
    }
    return v.get<std::string>();
  }

  std::filesystem::path path(const json &obj, const std::string &pointer, const char *key) const
  {
    std::filesystem::path p = text(obj, pointer, key);
    if (p.is_relative() && !base_.empty())
    {
      p = base_ / p;
    }
    return p;
  }

  ProblemSpec problem(const json &j) const
  {
    const std::string ptr = "/problem";
    ProblemSpec p;
    if (!j.is_object())
    {
      fail(ptr, "expected an object");
    }
    if (j.contains("matrix_market"))
    {
      only_keys(j, ptr, {"matrix_market"});
      p.kind = ProblemKind::MatrixMarket;
      p.path = path(j, ptr, "matrix_market");
      return p;
    }
    if (!j.contains("generator"))
    {
      fail(ptr, "needs either 'matrix_market' or 'generator'");
    }
    const std::string gen = text(j, ptr, "generator");
    if (gen == "convdiff")
    {
      only_keys(j, ptr, {"generator", "nx", "ny", "peclet"});
      p.kind = ProblemKind::ConvDiff;
      p.nx = j.contains("nx") ? count(j, ptr, "nx") : p.nx;
      p.ny = j.contains("ny") ? count(j, ptr, "ny") : p.ny;
      p.peclet = j.contains("peclet") ? number(j, ptr, "peclet") : p.peclet;
    }
    else if (gen == "spectrum")
    {
      only_keys(j, ptr, {"generator", "eigs", "seed"});
      p.kind = ProblemKind::Spectrum;
      if (!j.contains("eigs") || !j.at("eigs").is_array())
      {
        fail(ptr + "/eigs", "expected an array of eigenvalues");
      }
      for (std::size_t i = 0; i < j.at("eigs").size(); i++)
      {
        const auto &e = j.at("eigs")[i];
        if (!e.is_number())
        {
          fail(ptr + "/eigs/" + std::to_string(i), "expected a number");
        }
        p.eigs.push_back(e.get<double>());
      }
      if (!j.contains("seed"))
      {
        fail(ptr, "generator 'spectrum' is randomized and needs a 'seed'");
      }
      p.seed = seed(j, ptr, "seed");
    }
    else if (gen == "conditioned")
    {
      only_keys(j, ptr, {"generator", "n", "kappa", "seed"});
      p.kind = ProblemKind::Conditioned;
      if (!j.contains("n") || !j.contains("kappa"))
      {
        fail(ptr, "generator 'conditioned' needs 'n' and 'kappa'");
      }
      p.n = count(j, ptr, "n");
      p.kappa = number(j, ptr, "kappa");
      if (!j.contains("seed"))
      {
        fail(ptr, "generator 'conditioned' is randomized and needs a 'seed'");
      }
      p.seed = seed(j, ptr, "seed");
    }
    else
    {
      fail(ptr + "/generator", "unknown generator '" + gen + "'");
    }
    return p;
  }

  RhsSpec rhs(const json &j) const
  {
    const std::string ptr = "/rhs";
    RhsSpec r;
    if (j.is_string())
    {
      if (j.get<std::string>() != "ones")
      {
        fail(ptr, "expected \"ones\", {\"random\": seed} or {\"file\": path}");
      }
      r.kind = RhsKind::Ones;
      return r;
    }
    if (j.is_object() && j.contains("random"))
    {
      only_keys(j, ptr, {"random"});
      r.kind = RhsKind::Random;
      r.seed = seed(j, ptr, "random");
      return r;
    }
    if (j.is_object() && j.contains("file"))
    {
      only_keys(j, ptr, {"file"});
      r.kind = RhsKind::File;
      r.path = path(j, ptr, "file");
      return r;
    }
    fail(ptr, "expected \"ones\", {\"random\": seed} or {\"file\": path}");
  }

  VariantSpec variant(const json &j, std::size_t index) const
  {
    const std::string ptr = "/variants/" + std::to_string(index);
    only_keys(j, ptr,
              {"name", "solver", "scheme", "rtol", "max_iter", "restart", "simpler_variant",
               "simpler_omega", "weight_adaptive", "m1", "m2", "s", "t", "basis", "tsqr_blocks",
               "theta", "precision"});
    VariantSpec v;
    if (!j.contains("name"))
    {
      fail(ptr, "variant needs a 'name'");
    }
    v.name = text(j, ptr, "name");
    if (j.contains("solver"))
    {
      const auto s = text(j, ptr, "solver");
      const auto k = parse_solver(s);
      if (!k)
      {
        fail(ptr + "/solver", "unknown solver '" + s + "'");
      }
      v.solver = *k;
    }
    if (j.contains("scheme"))
    {
      const auto s = text(j, ptr, "scheme");
      if (s == "householder")
      {
        v.solver = SolverKind::Householder;
      }
      else
      {
        const auto k = parse_scheme(s);
        if (!k)
        {
          fail(ptr + "/scheme", "unknown scheme '" + s + "'");
        }
        v.scheme = *k;
      }
    }
    if (j.contains("rtol"))
    {
      v.rtol = number(j, ptr, "rtol");
    }
    if (j.contains("max_iter"))
    {
      v.max_iter = count(j, ptr, "max_iter");
    }
    if (j.contains("restart") && !j.at("restart").is_null())
    {
      v.restart = count(j, ptr, "restart");
    }
    if (j.contains("simpler_variant"))
    {
      v.simpler_variant = text(j, ptr, "simpler_variant");
      if (v.simpler_variant != "sgmres" && v.simpler_variant != "rb" &&
          v.simpler_variant != "adaptive")
      {
        fail(ptr + "/simpler_variant", "expected 'sgmres', 'rb' or 'adaptive'");
      }
    }
    if (j.contains("simpler_omega"))
    {
      v.simpler_omega = number(j, ptr, "simpler_omega");
    }
    if (j.contains("weight_adaptive"))
    {
      v.weight_adaptive = boolean(j, ptr, "weight_adaptive");
    }
    if (j.contains("m1"))
    {
      v.m1 = count(j, ptr, "m1");
    }
    if (j.contains("m2"))
    {
      v.m2 = count(j, ptr, "m2");
    }
    if (j.contains("s"))
    {
      v.s = count(j, ptr, "s");
    }
    if (j.contains("t"))
    {
      v.t = count(j, ptr, "t");
    }
    if (j.contains("basis"))
    {
      const auto b = text(j, ptr, "basis");
      if (b == "monomial")
      {
        v.basis = BasisKind::Monomial;
      }
      else if (b == "newton")
      {
        v.basis = BasisKind::Newton;
      }
      else if (b == "chebyshev")
      {
        v.basis = BasisKind::Chebyshev;
      }
      else
      {
        fail(ptr + "/basis", "expected 'monomial', 'newton' or 'chebyshev'");
      }
    }
    if (j.contains("tsqr_blocks"))
    {
      v.tsqr_blocks = count(j, ptr, "tsqr_blocks");
    }
    if (j.contains("theta") && !j.at("theta").is_null())
    {
      v.theta = number(j, ptr, "theta");
    }
    if (j.contains("precision"))
    {
      v.precision = text(j, ptr, "precision");
      if (v.precision != "mixed" && v.precision != "all_high")
      {
        fail(ptr + "/precision", "expected 'mixed' or 'all_high'");
      }
    }
    return v;
  }

  PerturbationSchedule inexact(const json &j) const
  {
    const std::string ptr = "/inexact";
    only_keys(j, ptr, {"mode", "eta", "seed"});
    PerturbationSchedule s;
    if (j.contains("mode"))
    {
      const auto m = text(j, ptr, "mode");
      if (m == "fixed")
      {
        s.mode = PerturbationMode::Fixed;
      }
      else if (m == "relaxed")
      {
        s.mode = PerturbationMode::Relaxed;
      }
      else
      {
        fail(ptr + "/mode", "expected 'fixed' or 'relaxed'");
      }
    }
    if (!j.contains("eta"))
    {
      fail(ptr, "perturbation schedule needs 'eta'");
    }
    s.eta = number(j, ptr, "eta");
    if (!(s.eta >= 0.0))
    {
      fail(ptr + "/eta", "eta must be >= 0");
    }
    if (s.eta > 0.0 && !j.contains("seed"))
    {
      fail(ptr, "a nonzero perturbation is randomized and needs a 'seed'");
    }
    if (j.contains("seed"))
    {
      s.seed = seed(j, ptr, "seed");
    }
    return s;
  }

private:
  const LineMap &lines_;
  std::filesystem::path base_;
};

bool safe_name(const std::string &name)
{
  return !name.empty() && std::all_of(name.begin(), name.end(),
                                      [](char c)
                                      {
                                        return std::isalnum(static_cast<unsigned char>(c)) ||
                                               c == '_' || c == '-' || c == '.';
                                      }) &&
         name != "." && name != "..";
}

std::string basis_name(BasisKind b)
{
  switch (b)
  {
    case BasisKind::Monomial:
      return "monomial";
    case BasisKind::Newton:
      return "newton";
    case BasisKind::Chebyshev:
      return "chebyshev";
  }
  return "monomial";
}

}  // namespace

std::string to_string(SolverKind k)
{
  switch (k)
  {
    case SolverKind::Gmres:
      return "gmres";
    case SolverKind::Householder:
      return "householder";
    case SolverKind::Simpler:
      return "simpler";
    case SolverKind::Gcr:
      return "gcr";
    case SolverKind::Orthodir:
      return "orthodir";
    case SolverKind::Weighted:
      return "weighted";
    case SolverKind::Lgmres:
      return "lgmres";
    case SolverKind::GmresE:
      return "gmres_e";
    case SolverKind::Sstep:
      return "sstep";
    case SolverKind::Pipelined:
      return "pipelined";
    case SolverKind::Lowsync:
      return "lowsync";
    case SolverKind::TwoPrecision:
      return "two_precision";
    case SolverKind::GmresIr:
      return "gmres_ir";
  }
  return "gmres";
}

std::optional<SolverKind> parse_solver(const std::string &name)
{
  for (auto k : {SolverKind::Gmres, SolverKind::Householder, SolverKind::Simpler,
                 SolverKind::Gcr, SolverKind::Orthodir, SolverKind::Weighted, SolverKind::Lgmres,
                 SolverKind::GmresE, SolverKind::Sstep, SolverKind::Pipelined, SolverKind::Lowsync,
                 SolverKind::TwoPrecision, SolverKind::GmresIr})
  {
    if (to_string(k) == name)
    {
      return k;
    }
  }
  return std::nullopt;
}

void ExperimentConfig::validate() const
{
  if (variants.empty())
  {
    throw ConfigError("config: 'variants' must list at least one solver variant");
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < variants.size(); i++)
  {
    const auto &v = variants[i];
    const std::string where = "config: variants[" + std::to_string(i) + "]";
    if (!safe_name(v.name))
    {
      throw ConfigError(where + ": name '" + v.name +
                        "' must be nonempty and use only letters, digits, '_', '-' or '.'");
    }
    if (!names.insert(v.name).second)
    {
      throw ConfigError(where + ": duplicate variant name '" + v.name + "'");
    }
    if (!(v.rtol > 0.0))
    {
      throw ConfigError(where + ": rtol must be positive");
    }
    if (v.restart && *v.restart == 0)
    {
      throw ConfigError(where + ": restart must be at least 1");
    }
    if (v.solver == SolverKind::Sstep && (v.s == 0 || v.t == 0))
    {
      throw ConfigError(where + ": s and t must be at least 1");
    }
    if ((v.solver == SolverKind::Lgmres || v.solver == SolverKind::GmresE) && v.m1 == 0)
    {
      throw ConfigError(where + ": m1 must be at least 1");
    }
    if (inexact && inexact->eta > 0.0 &&
        (v.solver == SolverKind::TwoPrecision || v.solver == SolverKind::GmresIr))
    {
      throw ConfigError(where + ": inexact products are not supported for '" +
                        to_string(v.solver) + "'");
    }
  }
  if (problem.kind == ProblemKind::ConvDiff && (problem.nx < 2 || problem.ny < 2))
  {
    throw ConfigError("config: problem: nx and ny must be at least 2");
  }
  if (problem.kind == ProblemKind::Spectrum && problem.eigs.empty())
  {
    throw ConfigError("config: problem: 'eigs' must be nonempty");
  }
  if ((problem.kind == ProblemKind::Spectrum || problem.kind == ProblemKind::Conditioned) &&
      !problem.seed)
  {
    throw ConfigError("config: problem: randomized generators need a seed");
  }
  if (problem.kind == ProblemKind::Conditioned && (problem.n == 0 || !(problem.kappa >= 1.0)))
  {
    throw ConfigError("config: problem: 'conditioned' needs n >= 1 and kappa >= 1");
  }
  if (inexact)
  {
    inexact->validate();
  }
  if (bound_checks && bound_steps == 0)
  {
    throw ConfigError("config: bound_steps must be at least 1");
  }
}

ExperimentConfig parse_config(const std::string &text, const std::filesystem::path &base_dir)
{
  json doc;
  try
  {
    doc = json::parse(text);
  }
  catch (const json::parse_error &e)
  {
    // Byte offset to line and column.
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < byte; i++)
    {
      if (text[i] == '\n')
      {
        line++;
        col = 1;
      }
      else
      {
        col++;
      }
    }
    throw ParseError("column " + std::to_string(col) + ": invalid JSON (" + e.what() + ")", line);
  }
  const LineMap lines(text);
  const Reader rd(lines, base_dir);
  rd.only_keys(doc, "",
               {"name", "problem", "rhs", "variants", "outputs", "bound_checks", "bound_steps",
                "inexact", "parallel"});

  ExperimentConfig cfg;
  if (doc.contains("name"))
  {
    cfg.name = rd.text(doc, "", "name");
  }
  if (!doc.contains("problem"))
  {
    rd.fail("", "missing 'problem'");
  }
  cfg.problem = rd.problem(doc.at("problem"));
  if (doc.contains("rhs"))
  {
    cfg.rhs = rd.rhs(doc.at("rhs"));
  }
  if (!doc.contains("variants") || !doc.at("variants").is_array())
  {
    rd.fail("/variants", "expected an array of solver variants");
  }
  for (std::size_t i = 0; i < doc.at("variants").size(); i++)
  {
    cfg.variants.push_back(rd.variant(doc.at("variants")[i], i));
  }
  if (doc.contains("outputs"))
  {
    cfg.output_dir = rd.path(doc, "", "outputs");
  }
  if (doc.contains("bound_checks"))
  {
    cfg.bound_checks = rd.boolean(doc, "", "bound_checks");
  }
  if (doc.contains("bound_steps"))
  {
    cfg.bound_steps = rd.count(doc, "", "bound_steps");
  }
  if (doc.contains("inexact") && !doc.at("inexact").is_null())
  {
    cfg.inexact = rd.inexact(doc.at("inexact"));
  }
  if (doc.contains("parallel"))
  {
    cfg.parallel = rd.boolean(doc, "", "parallel");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw KrylovError("cannot open config file '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::string config_to_json(const ExperimentConfig &config)
{
  json j;
  j["name"] = config.name;
  json p;
  switch (config.problem.kind)
  {
    case ProblemKind::MatrixMarket:
      p["matrix_market"] = config.problem.path.filename().string();
      break;
    case ProblemKind::ConvDiff:
      p["generator"] = "convdiff";
      p["nx"] = config.problem.nx;
      p["ny"] = config.problem.ny;
      p["peclet"] = config.problem.peclet;
      break;
    case ProblemKind::Spectrum:
      p["generator"] = "spectrum";
      p["eigs"] = config.problem.eigs;
      p["seed"] = config.problem.seed.value_or(0);
      break;
    case ProblemKind::Conditioned:
      p["generator"] = "conditioned";
      p["n"] = config.problem.n;
      p["kappa"] = config.problem.kappa;
      p["seed"] = config.problem.seed.value_or(0);
      break;
  }
  j["problem"] = p;
  switch (config.rhs.kind)
  {
    case RhsKind::Ones:
      j["rhs"] = "ones";
      break;
    case RhsKind::Random:
      j["rhs"] = {{"random", config.rhs.seed}};
      break;
    case RhsKind::File:
      j["rhs"] = {{"file", config.rhs.path.filename().string()}};
      break;
  }
  json vs = json::array();
  for (const auto &v : config.variants)
  {
    json o;
    o["name"] = v.name;
    o["solver"] = to_string(v.solver);
    o["scheme"] = to_string(v.scheme);
    o["rtol"] = v.rtol;
    o["max_iter"] = v.max_iter;
    o["restart"] = v.restart ? json(*v.restart) : json(nullptr);
    switch (v.solver)
    {
      case SolverKind::Simpler:
        o["simpler_variant"] = v.simpler_variant;
        o["simpler_omega"] = v.simpler_omega;
        break;
      case SolverKind::Weighted:
        o["weight_adaptive"] = v.weight_adaptive;
        break;
      case SolverKind::Lgmres:
      case SolverKind::GmresE:
        o["m1"] = v.m1;
        o["m2"] = v.m2;
        break;
      case SolverKind::Sstep:
        o["s"] = v.s;
        o["t"] = v.t;
        o["basis"] = basis_name(v.basis);
        o["tsqr_blocks"] = v.tsqr_blocks;
        break;
      case SolverKind::Pipelined:
        o["theta"] = v.theta ? json(*v.theta) : json(nullptr);
        break;
      case SolverKind::TwoPrecision:
      case SolverKind::GmresIr:
        o["precision"] = v.precision;
        break;
      default:
        break;
    }
    vs.push_back(o);
  }
  j["variants"] = vs;
  j["bound_checks"] = config.bound_checks;
  j["bound_steps"] = config.bound_steps;
  if (config.inexact)
  {
    j["inexact"] = {{"mode", to_string(config.inexact->mode)},
                    {"eta", config.inexact->eta},
                    {"seed", config.inexact->seed}};
  }
  else
  {
    j["inexact"] = nullptr;
  }
  return j.dump(2);
}

}  // namespace krylov
