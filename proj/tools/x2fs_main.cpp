/*
 * Copyright 2026 The x2fs Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <chrono>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "x2fs/session.hpp"

namespace {

using namespace x2fs;

struct CommonArgs {
  std::string variant = "add";
  unsigned key_bits = 1024;
  std::string listen;
  std::string connect;
  std::string input;
  std::string id_column = "id";
  std::string value_column = "value";
  std::string transcript;
  std::string seed_hex;
};

protocol::BlindingVariant parse_variant(const std::string& v) {
  if (v == "mult") return protocol::BlindingVariant::multiplicative;
  if (v == "add") return protocol::BlindingVariant::additive;
  throw CLI::ValidationError("--variant must be 'mult' or 'add'");
}

void add_common(CLI::App* cmd, CommonArgs& args, bool network) {
  cmd->add_option("--variant", args.variant, "Blinding variant: mult or add")
      ->check(CLI::IsMember({"mult", "add"}))
      ->capture_default_str();
  cmd->add_option("--id-column", args.id_column, "Record id column name")
      ->capture_default_str();
  cmd->add_option("--value-column", args.value_column, "Bit value column name")
      ->capture_default_str();
  if (network) {
    cmd->add_option("--listen", args.listen, "Listen on HOST:PORT");
    cmd->add_option("--connect", args.connect, "Connect to HOST:PORT");
    cmd->add_option("--input", args.input, "CSV input path")->required();
    cmd->add_option("--transcript", args.transcript,
                    "Write the session transcript to this path");
  }
#ifdef X2FS_TEST_HOOKS
  cmd->add_option("--seed", args.seed_hex,
                  "Deterministic RNG seed (hex); test builds only");
#endif
}

std::optional<Bytes> parse_seed(const std::string& hex) {
  if (hex.empty()) return std::nullopt;
  return from_hex(hex);
}

int run_party(runner::Role role, const CommonArgs& args) {
  runner::SessionConfig cfg;
  cfg.role = role;
  cfg.variant = parse_variant(args.variant);
  cfg.key_bits = args.key_bits;
  cfg.listen = args.listen;
  cfg.connect = args.connect;
  cfg.input_path = args.input;
  cfg.id_column = args.id_column;
  cfg.value_column = args.value_column;
  cfg.transcript_path = args.transcript;
  cfg.seed = parse_seed(args.seed_hex);

  const auto report = runner::serve_session(cfg);
  std::cout << runner::format_report(report);
  return 0;
}

int run_local_cmd(const CommonArgs& args, const std::string& carol_csv,
                  const std::string& felix_csv,
                  const std::string& carol_transcript,
                  const std::string& felix_transcript) {
  runner::LocalOptions opts;
  opts.id_column = args.id_column;
  opts.value_column = args.value_column;
  opts.carol_transcript = carol_transcript;
  opts.felix_transcript = felix_transcript;
  opts.seed = parse_seed(args.seed_hex);

  const auto reports = runner::run_local(carol_csv, felix_csv,
                                         parse_variant(args.variant),
                                         args.key_bits, opts);
  std::cout << runner::format_report(reports.carol);
  std::cout << runner::format_report(reports.felix);
  return 0;
}

int run_keygen_bench(unsigned key_bits, unsigned iterations) {
  SystemRandom rng;
  const auto param = paillier::SecurityParameter::for_modulus_bits(key_bits);
  double total_ms = 0;
  for (unsigned i = 0; i < iterations; ++i) {
    const auto start = std::chrono::steady_clock::now();
    const auto kp = paillier::keygen(param, rng);
    const auto stop = std::chrono::steady_clock::now();
    const double ms =
        std::chrono::duration<double, std::milli>(stop - start).count();
    total_ms += ms;
    std::cout << "keygen " << (i + 1) << ": " << ms << " ms, |N| = "
              << kp.pk.n().bit_length() << " bits\n";
  }
  std::cout << "mean: " << (total_ms / iterations) << " ms over " << iterations
            << " runs\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-party encrypted chi-squared feature evaluation"};
  app.require_subcommand(1);

  CommonArgs carol_args, felix_args, local_args;

  auto* carol = app.add_subcommand("carol", "Run the class-vector holder");
  add_common(carol, carol_args, true);
  carol->add_option("--key-bits", carol_args.key_bits,
                    "Paillier modulus size in bits")
      ->capture_default_str();

  auto* felix = app.add_subcommand("felix", "Run the feature-vector holder");
  add_common(felix, felix_args, true);

  auto* local = app.add_subcommand("local", "Run both parties in-process");
  std::string carol_csv, felix_csv, carol_transcript, felix_transcript;
  add_common(local, local_args, false);
  local->add_option("--carol-input", carol_csv, "Class-vector CSV")->required();
  local->add_option("--felix-input", felix_csv, "Feature-vector CSV")
      ->required();
  local->add_option("--key-bits", local_args.key_bits,
                    "Paillier modulus size in bits")
      ->capture_default_str();
  local->add_option("--carol-transcript", carol_transcript,
                    "Write Carol's transcript here");
  local->add_option("--felix-transcript", felix_transcript,
                    "Write Felix's transcript here");

  auto* bench = app.add_subcommand("keygen-bench", "Time key generation");
  unsigned bench_bits = 1024, bench_iters = 5;
  bench->add_option("--key-bits", bench_bits, "Paillier modulus size in bits")
      ->capture_default_str();
  bench->add_option("--iterations", bench_iters, "Number of key generations")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (carol->parsed()) return run_party(x2fs::runner::Role::carol, carol_args);
    if (felix->parsed()) return run_party(x2fs::runner::Role::felix, felix_args);
    if (local->parsed()) {
      return run_local_cmd(local_args, carol_csv, felix_csv, carol_transcript,
                           felix_transcript);
    }
    if (bench->parsed()) return run_keygen_bench(bench_bits, bench_iters);
  } catch (const x2fs::PeerAbortError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const x2fs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return x2fs::runner::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
