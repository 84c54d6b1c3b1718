// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "cbf/cli.hpp"
#include "cbf/beam_search.hpp"
#include "cbf/errors.hpp"
#include "cbf/simulation.hpp"
#include "cbf/text.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace cbf::cli
{

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

// Thrown for semantically invalid flag combinations; maps to exit status 2.
class usage_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

std::string utc_now()
{
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const fs::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes `content` and records its digest in the manifest output list.
void write_output(const fs::path& dir, const std::string& name, const std::string& content, json& outputs)
{
  fs::create_directories(dir);
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << content;
  out.close();
  if (!out)
    throw std::runtime_error("error while writing " + path.string());
  outputs.push_back({{"file", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
}

void write_manifest(const fs::path& dir,
                    const std::string& command,
                    const json& config,
                    std::uint64_t seed,
                    const std::string& started,
                    const json& outputs)
{
  const json manifest = {{"tool", tool_name},
                         {"version", tool_version},
                         {"command", command},
                         {"config", config},
                         {"seed", seed},
                         {"started_utc", started},
                         {"finished_utc", utc_now()},
                         {"outputs", outputs}};
  fs::create_directories(dir);
  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  out << manifest.dump(2) << '\n';
}

std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t flag_value)
{
  if (opt->count() > 0)
    return flag_value;
  if (const char* env = std::getenv(seed_env_var); env && *env)
  {
    try
    {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size())
        return v;
    }
    catch (const std::exception&)
    {
    }
    throw usage_error(std::string(seed_env_var) + " is not an unsigned integer");
  }
  return flag_value;
}

// Turns {"elements": 16, "method": "golay"} into {"--elements=16", "--method=golay"}.
std::vector<std::string> config_to_args(const fs::path& path)
{
  json doc;
  try
  {
    doc = json::parse(read_file(path));
  }
  catch (const json::exception& e)
  {
    throw cbf::parse_error("config " + path.string() + ": " + e.what());
  }
  if (!doc.is_object())
    throw cbf::parse_error("config " + path.string() + " must hold a JSON object");

  std::vector<std::string> args;
  for (const auto& [key, value] : doc.items())
  {
    std::string text;
    if (value.is_string())
      text = value.get<std::string>();
    else if (value.is_array())
    {
      for (std::size_t i = 0; i < value.size(); ++i)
        text += (i ? "," : "") + (value[i].is_string() ? value[i].get<std::string>() : value[i].dump());
    }
    else
      text = value.dump();
    if (value.is_boolean())
    {
      if (value.get<bool>())
        args.push_back("--" + key);
      continue;
    }
    args.push_back("--" + key + "=" + text);
  }
  return args;
}

// Inserts config-file arguments right after the subcommand name so explicit
// flags, which come later, win under the take-last policy.
std::vector<std::string> expand_config(const std::vector<std::string>& args)
{
  std::optional<fs::path> config;
  for (std::size_t i = 0; i < args.size(); ++i)
  {
    if (args[i] == "--config" && i + 1 < args.size())
      config = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0)
      config = args[i].substr(9);
  }
  if (!config || args.empty())
    return args;
  auto extra = config_to_args(*config);
  std::vector<std::string> out{args.front()};
  out.insert(out.end(), extra.begin(), extra.end());
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

std::vector<std::vector<std::size_t>> parse_weight_groups(const std::string& text, std::size_t accuracy)
{
  std::vector<std::vector<std::size_t>> groups;
  std::stringstream outer(text);
  std::string group;
  while (std::getline(outer, group, ';'))
  {
    std::vector<std::size_t> idx;
    std::stringstream inner(group);
    std::string item;
    while (std::getline(inner, item, ','))
    {
      std::size_t used = 0;
      unsigned long long v = 0;
      try
      {
        if (item.empty() || item.find('-') != std::string::npos)
          throw std::invalid_argument(item);
        v = std::stoull(item, &used);
      }
      catch (const std::exception&)
      {
        throw cbf::parse_error("malformed phase index '" + item + "' in --weights");
      }
      if (used != item.size())
        throw cbf::parse_error("malformed phase index '" + item + "' in --weights");
      if (v >= accuracy)
        throw cbf::parse_error("phase index " + item + " is not below the accuracy K = " + std::to_string(accuracy));
      idx.push_back(static_cast<std::size_t>(v));
    }
    if (idx.empty())
      throw cbf::parse_error("empty weight vector in --weights");
    groups.push_back(std::move(idx));
  }
  if (groups.empty())
    throw cbf::parse_error("--weights lists no weight vectors");
  for (const auto& g : groups)
    if (g.size() != groups.front().size())
      throw cbf::parse_error("all weight vectors in --weights must have the same length");
  return groups;
}

std::string pattern_csv(const composite_pattern& pattern)
{
  std::ostringstream ss;
  write_pattern_csv(pattern, ss);
  return ss.str();
}

// ---------------------------------------------------------------- search

struct search_args
{
  std::size_t elements = 0;
  std::size_t subarrays = 2;
  std::size_t accuracy = 4;
  std::string method = "exhaustive";
  std::size_t grid_points = 512;
  std::string grid_measure = "uniform-theta";
  double spacing = 0.5;
  std::uint64_t seed = 1;
  std::uint64_t budget = 100'000;
  std::uint64_t ceiling = 10'000'000;
  std::size_t workers = 1;
  std::string out = ".";
  std::string config;
};

int cmd_search(const search_args& a, const CLI::Option* seed_opt, std::ostream& out)
{
  const std::string started = utc_now();
  if (a.subarrays < 2)
    throw usage_error("--subarrays must be at least 2");
  if (a.elements % a.subarrays != 0)
    throw usage_error("--elements must be a multiple of --subarrays");

  const array_geometry geometry(a.elements, a.subarrays, a.spacing);
  const phase_codebook codebook(a.accuracy);
  const auto grid = angle_grid::make(grid_measure_from_string(a.grid_measure), a.grid_points);
  const auto method = search_method_from_string(a.method);
  search_options opts;
  opts.seed = resolve_seed(seed_opt, a.seed);
  opts.budget = a.budget;
  opts.candidate_ceiling = a.ceiling;
  opts.workers = a.workers;

  const auto groups = group_rf_chains(a.subarrays);
  const fs::path dir(a.out);
  json outputs = json::array();
  for (std::size_t gi = 0; gi < groups.size(); ++gi)
  {
    const auto set = find_complementary_set(geometry, groups[gi], codebook, grid, method, opts);
    const std::string suffix = groups.size() == 1 ? "" : "_group" + std::to_string(gi + 1);
    write_output(dir, "beamset" + suffix + ".json", beam_set_to_json(set), outputs);
    write_output(dir, "pattern" + suffix + ".csv", pattern_csv(set.composite()), outputs);
    if (groups.size() > 1)
      out << "group=" << gi + 1 << ' ';
    out << "variance=" << format_number(set.variance) << '\n';
  }

  const json config = {{"elements", a.elements}, {"subarrays", a.subarrays}, {"accuracy", a.accuracy},
                       {"method", a.method},     {"grid-points", a.grid_points}, {"grid-measure", a.grid_measure},
                       {"spacing", a.spacing},   {"budget", a.budget},       {"ceiling", a.ceiling},
                       {"workers", a.workers},   {"out", a.out}};
  write_manifest(dir, "search", config, opts.seed, started, outputs);
  return 0;
}

// ---------------------------------------------------------------- pattern

struct pattern_args
{
  std::string weights;
  std::string beamset;
  std::size_t accuracy = 4;
  double spacing = 0.5;
  std::size_t grid_points = 512;
  std::string grid_measure = "uniform-theta";
  std::string out = ".";
  std::string config;
};

int cmd_pattern(const pattern_args& a, const CLI::Option* grid_points_opt, const CLI::Option* grid_measure_opt, std::ostream& out)
{
  const std::string started = utc_now();
  if (a.weights.empty() == a.beamset.empty())
    throw usage_error("give exactly one of --weights or --beamset");

  composite_pattern pattern;
  json config = {{"out", a.out}};
  if (!a.beamset.empty())
  {
    const auto set = beam_set_from_json(read_file(a.beamset));
    angle_grid grid = set.grid;
    if (grid_points_opt->count() > 0 || grid_measure_opt->count() > 0)
      grid = angle_grid::make(grid_measure_from_string(a.grid_measure), a.grid_points);
    pattern = set.composite(grid);
    config["beamset"] = a.beamset;
    config["grid-points"] = grid.size();
    config["grid-measure"] = std::string(to_string(grid.measure()));
  }
  else
  {
    const auto groups = parse_weight_groups(a.weights, a.accuracy);
    const phase_codebook codebook(a.accuracy);
    const array_geometry geometry(groups.size() * groups.front().size(), groups.size(), a.spacing);
    const auto grid = angle_grid::make(grid_measure_from_string(a.grid_measure), a.grid_points);
    std::vector<beam_pattern> members;
    for (std::size_t m = 0; m < groups.size(); ++m)
      members.push_back(make_beam_pattern(codebook.weights(groups[m]), geometry, m, grid));
    pattern = make_composite_pattern(std::move(members));
    config["weights"] = a.weights;
    config["accuracy"] = a.accuracy;
    config["spacing"] = a.spacing;
    config["grid-points"] = a.grid_points;
    config["grid-measure"] = a.grid_measure;
  }

  json outputs = json::array();
  const fs::path dir(a.out);
  write_output(dir, "pattern.csv", pattern_csv(pattern), outputs);
  write_manifest(dir, "pattern", config, 0, started, outputs);
  out << "variance=" << format_number(pattern.variance) << '\n';
  return 0;
}

// ---------------------------------------------------------------- ber

struct ber_args
{
  std::string scheme = "cbf";
  std::string channel = "awgn";
  std::string snr_db = "0:2:10";
  std::string angles;
  std::uint64_t min_bits = 1'000'000;
  std::uint64_t max_errors = 200;
  std::uint64_t max_bits = 0;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::size_t elements = 8;
  std::size_t subarrays = 2;
  double spacing = 0.5;
  std::size_t rbf_block = 2;
  std::size_t fading_block = default_fading_block;
  bool independent_subarrays = false;
  std::string beamset;
  std::string out = ".";
  std::string config;
};

int cmd_ber(const ber_args& a, const CLI::Option* seed_opt)
{
  const std::string started = utc_now();
  sim_config cfg;
  cfg.scheme.kind = scheme_kind_from_string(a.scheme);
  cfg.channel = channel_kind_from_string(a.channel);
  if (a.elements % a.subarrays != 0)
    throw usage_error("--elements must be a multiple of --subarrays");
  cfg.scheme.geometry = array_geometry(a.elements, a.subarrays, a.spacing);
  cfg.scheme.rbf_block_length = a.rbf_block;
  cfg.equal_subarrays = !a.independent_subarrays;
  cfg.fading_block = a.fading_block;
  cfg.min_bits = a.min_bits;
  cfg.max_errors = a.max_errors;
  cfg.max_bits = a.max_bits;
  cfg.workers = a.workers;
  cfg.seed = resolve_seed(seed_opt, a.seed);

  if (a.angles.empty())
    cfg.angles = default_angles();
  else
    for (double d : parse_list(a.angles))
      cfg.angles.push_back(deg_to_rad(d));
  for (double e : parse_range(a.snr_db))
    cfg.snr_grid.push_back({e});

  std::string beam_source = "none";
  if (cfg.scheme.kind == scheme_kind::cbf)
  {
    if (!a.beamset.empty())
    {
      cfg.scheme.beams = beam_set_from_json(read_file(a.beamset));
      beam_source = a.beamset;
    }
    else
    {
      const auto ns = cfg.scheme.geometry.elements_per_subarray();
      const bool pow2 = ns != 0 && (ns & (ns - 1)) == 0;
      const auto method = pow2 ? search_method::golay : search_method::exhaustive;
      if (cfg.scheme.geometry.num_subarrays() != 2)
        throw usage_error("cbf needs --subarrays 2");
      cfg.scheme.beams = find_complementary_pair(cfg.scheme.geometry, phase_codebook(4), angle_grid::uniform_theta(512), method);
      beam_source = std::string(to_string(method));
    }
  }

  const auto curve = run_ber(cfg);
  std::ostringstream csv;
  write_ber_csv(curve, csv);

  json outputs = json::array();
  const fs::path dir(a.out);
  write_output(dir, "ber.csv", csv.str(), outputs);

  std::vector<double> angles_deg;
  for (double r : cfg.angles)
    angles_deg.push_back(rad_to_deg(r));
  std::vector<double> snr;
  for (const auto& p : cfg.snr_grid)
    snr.push_back(p.ebn0_db);
  const json config = {{"scheme", a.scheme},
                       {"channel", a.channel},
                       {"snr-db", snr},
                       {"angles", angles_deg},
                       {"min-bits", a.min_bits},
                       {"max-errors", a.max_errors},
                       {"max-bits", cfg.bit_cap()},
                       {"workers", a.workers},
                       {"elements", a.elements},
                       {"subarrays", a.subarrays},
                       {"spacing", a.spacing},
                       {"rbf-block", a.rbf_block},
                       {"fading-block", a.fading_block},
                       {"independent-subarrays", a.independent_subarrays},
                       {"beamset", beam_source},
                       {"out", a.out}};
  write_manifest(dir, "ber", config, cfg.seed, started, outputs);
  return 0;
}

} // namespace

std::vector<double> parse_list(const std::string& text)
{
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
  {
    std::size_t used = 0;
    double v = 0.0;
    try
    {
      v = std::stod(item, &used);
    }
    catch (const std::exception&)
    {
      throw cbf::parse_error("malformed number '" + item + "'");
    }
    if (used != item.size() || !std::isfinite(v))
      throw cbf::parse_error("malformed number '" + item + "'");
    out.push_back(v);
  }
  if (out.empty())
    throw cbf::parse_error("empty list");
  return out;
}

std::vector<double> parse_range(const std::string& text)
{
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':'))
    parts.push_back(parse_list(item).at(0));
  if (parts.size() == 1)
    return parts;
  if (parts.size() != 3)
    throw cbf::parse_error("range must look like start:step:stop, got '" + text + "'");
  const double start = parts[0], step = parts[1], stop = parts[2];
  if (!(step > 0.0) || stop < start)
    throw cbf::parse_error("range needs a positive step and stop >= start");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = start + step * static_cast<double>(i);
  return out;
}

std::string sha256_hex(const std::string& data)
{
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i)
  {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Complementary beamforming toolkit: beam search, patterns and BER campaigns", tool_name};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version);

  search_args sa;
  auto* search = app.add_subcommand("search", "find complementary beam sets");
  search->add_option("--elements", sa.elements, "total array elements N")->required()->check(CLI::PositiveNumber);
  search->add_option("--subarrays", sa.subarrays, "number of sub-arrays M")->check(CLI::PositiveNumber);
  search->add_option("--accuracy", sa.accuracy, "phase codebook size K")->check(CLI::PositiveNumber);
  search->add_option("--method", sa.method, "exhaustive | golay | stochastic")
      ->check(CLI::IsMember({"exhaustive", "golay", "stochastic"}));
  search->add_option("--grid-points", sa.grid_points, "scoring grid size")->check(CLI::Range(2, 1 << 24));
  search->add_option("--grid-measure", sa.grid_measure, "uniform-theta | uniform-psi")
      ->check(CLI::IsMember({"uniform-theta", "uniform-psi"}));
  search->add_option("--spacing", sa.spacing, "element spacing in wavelengths")->check(CLI::PositiveNumber);
  auto* search_seed = search->add_option("--seed", sa.seed, "seed for the stochastic method");
  search->add_option("--budget", sa.budget, "stochastic evaluation budget")->check(CLI::PositiveNumber);
  search->add_option("--ceiling", sa.ceiling, "exhaustive candidate ceiling")->check(CLI::PositiveNumber);
  search->add_option("--workers", sa.workers, "worker threads")->check(CLI::PositiveNumber);
  search->add_option("--out", sa.out, "output directory");
  search->add_option("--config", sa.config, "JSON config file (flags override)");

  pattern_args pa;
  auto* pattern = app.add_subcommand("pattern", "evaluate beam patterns");
  pattern->add_option("--weights", pa.weights, "phase indices, e.g. 0,1,0,1;0,0,1,1");
  pattern->add_option("--beamset", pa.beamset, "beam-set JSON written by search");
  pattern->add_option("--accuracy", pa.accuracy, "phase codebook size K for --weights")->check(CLI::PositiveNumber);
  pattern->add_option("--spacing", pa.spacing, "element spacing in wavelengths")->check(CLI::PositiveNumber);
  auto* pattern_points = pattern->add_option("--grid-points", pa.grid_points, "grid size")->check(CLI::Range(2, 1 << 24));
  auto* pattern_measure = pattern->add_option("--grid-measure", pa.grid_measure, "uniform-theta | uniform-psi")
                              ->check(CLI::IsMember({"uniform-theta", "uniform-psi"}));
  pattern->add_option("--out", pa.out, "output directory");
  pattern->add_option("--config", pa.config, "JSON config file (flags override)");

  ber_args ba;
  auto* ber = app.add_subcommand("ber", "Monte Carlo BER campaign");
  ber->add_option("--scheme", ba.scheme, "cbf | rbf | single")->check(CLI::IsMember({"cbf", "rbf", "single"}));
  ber->add_option("--channel", ba.channel, "awgn | rayleigh")->check(CLI::IsMember({"awgn", "rayleigh"}));
  ber->add_option("--snr-db", ba.snr_db, "Eb/N0 grid start:step:stop in dB");
  ber->add_option("--angles", ba.angles, "observation angles in degrees, comma separated");
  ber->add_option("--min-bits", ba.min_bits, "minimum simulated bits per point")->check(CLI::Range(uint64_t{10'000}, std::numeric_limits<uint64_t>::max()));
  ber->add_option("--max-errors", ba.max_errors, "target bit errors per point")->check(CLI::PositiveNumber);
  ber->add_option("--max-bits", ba.max_bits, "bit cap per point (default 10 x min-bits)");
  auto* ber_seed = ber->add_option("--seed", ba.seed, "root seed");
  ber->add_option("--workers", ba.workers, "worker threads")->check(CLI::PositiveNumber);
  ber->add_option("--elements", ba.elements, "total array elements N")->check(CLI::PositiveNumber);
  ber->add_option("--subarrays", ba.subarrays, "number of sub-arrays M")->check(CLI::PositiveNumber);
  ber->add_option("--spacing", ba.spacing, "element spacing in wavelengths")->check(CLI::PositiveNumber);
  ber->add_option("--rbf-block", ba.rbf_block, "symbols per random pattern (rbf)");
  ber->add_option("--fading-block", ba.fading_block, "symbols per Rayleigh block");
  ber->add_flag("--independent-subarrays", ba.independent_subarrays, "draw h1 and h2 independently");
  ber->add_option("--beamset", ba.beamset, "beam-set JSON for cbf (default: constructed pair)");
  ber->add_option("--out", ba.out, "output directory");
  ber->add_option("--config", ba.config, "JSON config file (flags override)");

  try
  {
    auto args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);

    if (search->parsed())
      return cmd_search(sa, search_seed, out);
    if (pattern->parsed())
      return cmd_pattern(pa, pattern_points, pattern_measure, out);
    if (ber->parsed())
      return cmd_ber(ba, ber_seed);
    return 2;
  }
  catch (const CLI::CallForHelp&)
  {
    out << (app.got_subcommand(search) ? search->help() : app.got_subcommand(pattern) ? pattern->help()
                                                        : app.got_subcommand(ber)     ? ber->help()
                                                                                      : app.help());
    return 0;
  }
  catch (const CLI::CallForVersion&)
  {
    out << tool_version << '\n';
    return 0;
  }
  catch (const CLI::ParseError& e)
  {
    err << tool_name << ": " << e.what() << "\n" << "run '" << tool_name << " --help' for usage\n";
    return 2;
  }
  catch (const usage_error& e)
  {
    err << tool_name << ": " << e.what() << '\n';
    return 2;
  }
  catch (const cbf::parse_error& e)
  {
    err << tool_name << ": " << e.what() << '\n';
    return 2;
  }
  catch (const capacity_error& e)
  {
    err << tool_name << ": " << e.what() << " (raise --ceiling or use --method golay|stochastic)\n";
    return 1;
  }
  catch (const std::exception& e)
  {
    err << tool_name << ": " << e.what() << '\n';
    return 1;
  }
}

} // namespace cbf::cli
