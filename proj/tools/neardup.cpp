// neardup: near-duplicate detection and duplication-bias auditing for code
// corpora. Stages exchange files: tokenize -> detect -> stats / audit / dedup
// / weights / bias, plus the synthetic `lab` experiment.
//
// Exit status: 0 success, 1 data error, 2 usage error.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "neardup/analysis.hpp"
#include "neardup/bias.hpp"
#include "neardup/bias_lab.hpp"
#include "neardup/corpus_io.hpp"
#include "neardup/detector.hpp"
#include "neardup/errors.hpp"
#include "neardup/lexer.hpp"

namespace {

using namespace neardup;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

int verbosity = 1;  // 0 quiet, 1 normal, 2 verbose

std::ostream& note() {
  static std::ostream null_stream(nullptr);
  return verbosity >= 1 ? std::cerr : null_stream;
}

unsigned default_jobs() {
  if (const char* env = std::getenv("NEARDUP_JOBS")) {
    try {
      int n = std::stoi(env);
      if (n >= 1) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid NEARDUP_JOBS=" << env << "\n";
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open \"" + path + "\" for reading");
  return in;
}

// Writes to `path`, or to stdout when the path is empty or "-".
template <typename Writer>
void with_output(const std::string& path, Writer&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open \"" + path + "\" for writing");
  write(out);
  out.flush();
  if (!out) throw DataError("write to \"" + path + "\" failed");
}

std::string offender_list(const std::vector<DocId>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < 10; ++i) out += "\n  " + ids[i];
  if (ids.size() > 10) out += "\n  ... (" + std::to_string(ids.size() - 10) + " more)";
  return out;
}

// Attaches cluster groups to a universe coming from another input, reporting
// every group member the universe lacks.
DuplicationReport with_universe(const DuplicationReport& clusters,
                                std::vector<DocId> universe,
                                const std::string& universe_source) {
  std::set<DocId> known(universe.begin(), universe.end());
  std::vector<DocId> missing;
  for (const auto& id : clusters.universe()) {
    if (!known.contains(id)) missing.push_back(id);
  }
  if (!missing.empty()) {
    throw DataError(std::to_string(missing.size()) + " clustered id(s) missing from " +
                    universe_source + ":" + offender_list(missing));
  }
  return DuplicationReport(std::move(universe), clusters.groups());
}

std::vector<DocId> admitted_ids(const std::vector<TokenDocument>& docs,
                                std::size_t min_tokens) {
  std::vector<DocId> ids;
  for (const auto& d : docs) {
    if (d.tokens.size() >= min_tokens) ids.push_back(d.id);
  }
  return ids;
}

DuplicationReport load_clusters(const std::string& path) {
  auto in = open_input(path);
  try {
    return read_clusters(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::vector<TokenDocument> load_tokens(const std::string& path) {
  auto in = open_input(path);
  try {
    return read_token_documents(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

ordered_json optional_number(const std::optional<double>& value) {
  return value ? ordered_json(*value) : ordered_json(nullptr);
}

// ---------------------------------------------------------------- tokenize

struct TokenizeArgs {
  std::string lang;
  std::string input;
  std::string output;
};

int run_tokenize(const TokenizeArgs& args, unsigned jobs) {
  SourceLanguage lang = *parse_language(args.lang);
  ScanResult scan = scan_tree(args.input, lang, jobs);
  for (const auto& skipped : scan.skipped) {
    note() << "skipped " << skipped.path << ": " << skipped.reason << "\n";
  }
  note() << "tokenized " << scan.documents.size() << " file(s), skipped "
         << scan.skipped.size() << "\n";
  if (scan.documents.empty()) {
    std::cerr << "error: no " << language_name(lang) << " files were tokenized under "
              << args.input << "\n";
    return kExitData;
  }
  with_output(args.output, [&](std::ostream& out) {
    write_token_documents(scan.documents, out);
  });
  return 0;
}

// ------------------------------------------------------------------ detect

struct DetectArgs {
  std::string tokens;
  std::string output;
  std::string t0 = "0.8";
  std::string t1 = "0.7";
  std::size_t min_tokens = 20;
  bool no_index = false;
  bool no_pruning = false;
};

int run_detect(const DetectArgs& args, unsigned jobs) {
  DetectionParams params;
  params.t0 = Threshold::parse(args.t0);
  params.t1 = Threshold::parse(args.t1);
  params.min_tokens = args.min_tokens;
  DetectOptions options;
  options.jobs = jobs;
  options.token_index = !args.no_index;
  options.size_pruning = !args.no_pruning;

  auto docs = load_tokens(args.tokens);
  Detection result = detect(docs, params, options);
  with_output(args.output, [&](std::ostream& out) { write_clusters(result.report, out); });

  note() << "files admitted: " << result.report.num_files()
         << ", undersized: " << result.undersized.size()
         << ", groups: " << result.report.num_groups();
  if (result.report.num_files() > 0) {
    note() << ", duplication factor: " << duplication_factor(result.report);
  }
  note() << "\n";
  if (verbosity >= 2) {
    for (const auto& u : result.undersized) {
      std::cerr << "undersized " << u.doc_id << " (" << u.n << " tokens)\n";
    }
  }
  return 0;
}

// ------------------------------------------------------------------- stats

struct StatsArgs {
  std::string tokens;
  std::string clusters;
  std::string output;
  double train_fraction = 0.6;
  std::size_t min_tokens = 20;
};

int run_stats(const StatsArgs& args) {
  auto docs = load_tokens(args.tokens);
  auto report = with_universe(load_clusters(args.clusters),
                              admitted_ids(docs, args.min_tokens), args.tokens);
  CorpusStats stats = corpus_stats(report, args.train_fraction);
  ordered_json j;
  j["num_files"] = stats.num_files;
  j["num_groups"] = stats.num_groups;
  j["duplication_factor"] = stats.duplication_factor;
  j["group_size_mean"] = optional_number(stats.group_size_mean);
  j["group_size_median"] = optional_number(stats.group_size_median);
  j["train_fraction"] = stats.train_fraction;
  j["expected_cross_set_fraction"] = stats.expected_cross_set_fraction;
  with_output(args.output, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
  return 0;
}

// ------------------------------------------------------------------- audit

struct AuditArgs {
  std::string clusters;
  std::string split;
  std::string tokens;
  std::size_t min_tokens = 20;
  std::string output;
  std::string variant;
  std::string variant_output;
};

int run_audit(const AuditArgs& args) {
  auto in = open_input(args.split);
  SplitAssignment split;
  try {
    split = read_split(in);
  } catch (const DataError& e) {
    throw DataError(args.split + ": " + e.what());
  }

  std::vector<DocId> universe;
  std::string source = args.split;
  if (!args.tokens.empty()) {
    universe = admitted_ids(load_tokens(args.tokens), args.min_tokens);
    source = args.tokens;
  } else {
    for (const auto& [id, fold] : split) universe.push_back(id);
  }
  auto report = with_universe(load_clusters(args.clusters), std::move(universe), source);

  SplitAudit audit = audit_split(report, split);
  ordered_json j;
  j["in_train"] = audit.in_train;
  j["in_test"] = audit.in_test;
  j["cross_set"] = audit.cross_set;
  j["test_cross_set_fraction"] = audit.test_cross_set_fraction;
  with_output(args.output, [&](std::ostream& out) { out << j.dump(2) << '\n'; });

  if (!args.variant.empty()) {
    auto ids = derive_test_variant(report, split, *parse_variant(args.variant));
    with_output(args.variant_output, [&](std::ostream& out) {
      for (const auto& id : ids) out << id << '\n';
    });
  }
  return 0;
}

// ------------------------------------------------------------------- dedup

struct DedupArgs {
  std::string clusters;
  std::string tokens;
  std::string output;
};

int run_dedup(const DedupArgs& args) {
  // Every file of the token corpus is a candidate; files below the size
  // floor were never clustered and are kept as singletons.
  std::vector<DocId> universe;
  for (const auto& d : load_tokens(args.tokens)) universe.push_back(d.id);
  auto report = with_universe(load_clusters(args.clusters), std::move(universe), args.tokens);
  auto keep = select_representatives(report);
  with_output(args.output, [&](std::ostream& out) {
    for (const auto& id : keep) out << id << '\n';
  });
  note() << "kept " << keep.size() << " of " << report.num_files() << " files\n";
  return 0;
}

// ----------------------------------------------------------------- weights

struct WeightsArgs {
  std::string clusters;
  std::string tokens;
  std::size_t min_tokens = 20;
  std::string output;
};

int run_weights(const WeightsArgs& args) {
  auto clusters = load_clusters(args.clusters);
  DuplicationReport report = clusters;
  if (!args.tokens.empty()) {
    report = with_universe(clusters, admitted_ids(load_tokens(args.tokens), args.min_tokens),
                           args.tokens);
  }
  with_output(args.output, [&](std::ostream& out) {
    for (const auto& w : sample_weights(report)) {
      ordered_json j;
      j["filename"] = w.id;
      j["weight"] = w.weight;
      out << j.dump() << '\n';
    }
  });
  return 0;
}

// -------------------------------------------------------------------- bias

struct BiasArgs {
  std::string metrics;
  std::string clusters;
  std::string output;
};

int run_bias(const BiasArgs& args) {
  auto in = open_input(args.metrics);
  std::vector<MetricRecord> metrics;
  try {
    metrics = read_metrics(in);
  } catch (const DataError& e) {
    throw DataError(args.metrics + ": " + e.what());
  }
  std::vector<DocId> universe;
  std::set<DocId> seen;
  std::vector<DocId> repeated;
  for (const auto& m : metrics) {
    if (seen.insert(m.id).second) {
      universe.push_back(m.id);
    } else {
      repeated.push_back(m.id);
    }
  }
  if (!repeated.empty()) {
    throw DataError(args.metrics + ": repeated metric ids:" + offender_list(repeated));
  }
  auto report = with_universe(load_clusters(args.clusters), std::move(universe), args.metrics);
  BiasDecomposition result = decompose(metrics, report);
  ordered_json j;
  j["d"] = result.d;
  j["f_hat"] = result.f_hat;
  j["f_bar"] = result.f_bar;
  j["beta"] = optional_number(result.beta);
  with_output(args.output, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
  return 0;
}

// --------------------------------------------------------------------- lab

struct LabArgs {
  LabGenConfig cfg;
  std::optional<std::uint64_t> split_seed;
  double train_fraction = 0.5;
  double valid_fraction = 0.1;
  std::string output;
};

ordered_json lab_json(const LabResult& r) {
  ordered_json j;
  j["fully_unbiased_acc"] = r.fully_unbiased_acc;
  j["unbiased_test_acc"] = r.unbiased_test_acc;
  j["cross_set_biased_acc"] = r.cross_set_biased_acc;
  j["fully_biased_acc"] = r.fully_biased_acc;
  j["cross_set_subset_acc"] = optional_number(r.cross_set_subset_acc);
  j["d"] = r.d;
  j["num_docs"] = r.num_docs;
  j["train_size"] = r.train_size;
  j["no_dups_size"] = r.no_dups_size;
  j["cross_set_only_size"] = r.cross_set_only_size;
  j["all_dups_size"] = r.all_dups_size;
  return j;
}

void print_lab_table(const LabResult& r, std::ostream& out) {
  auto row = [&](const char* training, const char* test, double acc, std::size_t n) {
    out << std::left << std::setw(10) << training << std::setw(26) << test
        << std::right << std::fixed << std::setprecision(4) << acc
        << std::setw(8) << n << '\n';
  };
  out << std::left << std::setw(10) << "training" << std::setw(26) << "test set"
      << std::right << std::setw(8) << "accuracy" << std::setw(8) << "n" << '\n';
  row("unbiased", "no dups (fully unbiased)", r.fully_unbiased_acc, r.no_dups_size);
  row("biased", "no dups (unbiased test)", r.unbiased_test_acc, r.no_dups_size);
  row("biased", "cross-set dups", r.cross_set_biased_acc, r.cross_set_only_size);
  row("biased", "all dups (fully biased)", r.fully_biased_acc, r.all_dups_size);
  out << "duplication factor d = " << std::setprecision(4) << r.d << " over "
      << r.num_docs << " files\n";
  out.unsetf(std::ios::floatfield);
}

int run_lab(const LabArgs& args, unsigned jobs) {
  LabResult result = run_experiment(args.cfg, args.train_fraction, args.valid_fraction,
                                    args.split_seed.value_or(args.cfg.seed), jobs);
  with_output(args.output, [&](std::ostream& out) { out << lab_json(result).dump(2) << '\n'; });
  if (verbosity >= 1) print_lab_table(result, std::cerr);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-duplicate detection and duplication-bias auditing for code corpora"};
  app.require_subcommand(1);
  app.fallthrough();

  unsigned jobs = default_jobs();
  bool quiet = false;
  int verbose = 0;
  app.add_option("-j,--jobs", jobs, "Worker threads (default: $NEARDUP_JOBS or all cores)")
      ->check(CLI::PositiveNumber);
  app.add_flag("-q,--quiet", quiet, "Only print errors");
  app.add_flag("-v,--verbose", verbose, "Print per-file diagnostics");

  std::vector<std::string> language_names;
  for (auto lang : kAllLanguages) language_names.emplace_back(language_name(lang));
  const auto threshold_check = CLI::Validator(
      [](std::string& s) -> std::string {
        try {
          Threshold::parse(s);
        } catch (const UsageError& e) {
          return e.what();
        }
        return {};
      },
      "DECIMAL in (0,1]");

  TokenizeArgs tok;
  auto* cmd_tok = app.add_subcommand("tokenize", "Extract identifier/literal tokens from a source tree");
  cmd_tok->add_option("--lang", tok.lang, "Source language")
      ->required()
      ->check(CLI::IsMember(language_names));
  cmd_tok->add_option("--input", tok.input, "Root directory to scan")->required();
  cmd_tok->add_option("--output", tok.output, "Token JSONL file")->required();

  DetectArgs det;
  auto* cmd_det = app.add_subcommand("detect", "Find near-duplicate clusters in a token corpus");
  cmd_det->add_option("--tokens", det.tokens, "Token JSONL file")->required();
  cmd_det->add_option("--output", det.output, "Cluster JSON file")->required();
  cmd_det->add_option("--t0", det.t0, "Distinct-token Jaccard threshold")->capture_default_str()->check(threshold_check);
  cmd_det->add_option("--t1", det.t1, "Token-multiset Jaccard threshold")->capture_default_str()->check(threshold_check);
  cmd_det->add_option("--min-tokens", det.min_tokens, "Minimum tokens per file")->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd_det->add_flag("--no-index", det.no_index, "Scan all pairs instead of using the token index");
  cmd_det->add_flag("--no-pruning", det.no_pruning, "Disable size-ratio pruning");

  StatsArgs st;
  auto* cmd_stats = app.add_subcommand("stats", "Corpus duplication statistics as JSON");
  cmd_stats->add_option("--tokens", st.tokens, "Token JSONL file")->required();
  cmd_stats->add_option("--clusters", st.clusters, "Cluster JSON file")->required();
  cmd_stats->add_option("--train-fraction", st.train_fraction,
                        "Train share for the expected cross-set column")->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  cmd_stats->add_option("--min-tokens", st.min_tokens, "Minimum tokens per file")->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd_stats->add_option("--output", st.output, "Output file (default: stdout)");

  AuditArgs au;
  auto* cmd_audit = app.add_subcommand("audit", "Classify duplicates across a train/valid/test split");
  cmd_audit->add_option("--clusters", au.clusters, "Cluster JSON file")->required();
  cmd_audit->add_option("--split", au.split, "Split JSONL file")->required();
  cmd_audit->add_option("--tokens", au.tokens,
                        "Token JSONL file defining the analyzed files (default: split ids)");
  cmd_audit->add_option("--min-tokens", au.min_tokens, "Minimum tokens per file")->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd_audit->add_option("--output", au.output, "Audit JSON (default: stdout)");
  cmd_audit->add_option("--variant", au.variant, "Also write this test-set variant")
      ->check(CLI::IsMember({"no_dups", "cross_set_only", "all_dups"}));
  cmd_audit->add_option("--variant-output", au.variant_output, "File for --variant ids")
      ->needs(cmd_audit->get_option("--variant"));

  DedupArgs dd;
  auto* cmd_dedup = app.add_subcommand("dedup", "List one representative per cluster plus all other files");
  cmd_dedup->add_option("--clusters", dd.clusters, "Cluster JSON file")->required();
  cmd_dedup->add_option("--tokens", dd.tokens, "Token JSONL file")->required();
  cmd_dedup->add_option("--output", dd.output, "Keep list, one id per line")->required();

  WeightsArgs wt;
  auto* cmd_weights = app.add_subcommand("weights", "Per-file 1/c weights as JSONL");
  cmd_weights->add_option("--clusters", wt.clusters, "Cluster JSON file")->required();
  cmd_weights->add_option("--output", wt.output, "Weights JSONL file")->required();
  cmd_weights->add_option("--tokens", wt.tokens,
                          "Token JSONL file; adds weight-1 singletons");
  cmd_weights->add_option("--min-tokens", wt.min_tokens, "Minimum tokens per file")->capture_default_str()
      ->check(CLI::PositiveNumber);

  BiasArgs bi;
  auto* cmd_bias = app.add_subcommand("bias", "Decompose a per-file metric into unbiased mean and duplication bias");
  cmd_bias->add_option("--metrics", bi.metrics, "Metric JSONL file")->required();
  cmd_bias->add_option("--clusters", bi.clusters, "Cluster JSON file")->required();
  cmd_bias->add_option("--output", bi.output, "Output file (default: stdout)");

  LabArgs lab;
  std::uint64_t split_seed = 0;
  auto* cmd_lab = app.add_subcommand("lab", "Synthetic memorization experiment on planted duplicates");
  cmd_lab->add_option("--seed", lab.cfg.seed, "Corpus generation seed")->capture_default_str();
  auto* split_seed_opt =
      cmd_lab->add_option("--split-seed", split_seed, "Split seed (default: --seed)");
  cmd_lab->add_option("--n-base", lab.cfg.n_base, "Base documents")->capture_default_str()->check(CLI::PositiveNumber);
  cmd_lab->add_option("--vocab-size", lab.cfg.vocab_size, "Vocabulary size")->capture_default_str();
  cmd_lab->add_option("--doc-len", lab.cfg.doc_len, "Tokens per document")->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd_lab->add_option("--dup-rate", lab.cfg.dup_rate, "Fraction of bases with copies")->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  cmd_lab->add_option("--mean-copies", lab.cfg.mean_extra_copies, "Mean extra copies")->capture_default_str();
  cmd_lab->add_option("--max-copies", lab.cfg.max_extra_copies, "Cap on extra copies")->capture_default_str();
  cmd_lab->add_option("--perturb-rate", lab.cfg.perturb_rate, "Token replacement rate per copy")->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  cmd_lab->add_option("--n-labels", lab.cfg.n_labels, "Class labels")->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd_lab->add_option("--common-fraction", lab.cfg.common_fraction,
                      "Share of tokens drawn from a vocabulary common to all bases")->capture_default_str();
  cmd_lab->add_option("--train-fraction", lab.train_fraction, "Train share")->capture_default_str();
  cmd_lab->add_option("--valid-fraction", lab.valid_fraction, "Validation share")->capture_default_str();
  cmd_lab->add_option("--output", lab.output, "Result JSON (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  verbosity = quiet ? 0 : 1 + (verbose > 0 ? 1 : 0);
  if (*split_seed_opt) lab.split_seed = split_seed;

  try {
    if (*cmd_tok) return run_tokenize(tok, jobs);
    if (*cmd_det) return run_detect(det, jobs);
    if (*cmd_stats) return run_stats(st);
    if (*cmd_audit) return run_audit(au);
    if (*cmd_dedup) return run_dedup(dd);
    if (*cmd_weights) return run_weights(wt);
    if (*cmd_bias) return run_bias(bi);
    if (*cmd_lab) return run_lab(lab, jobs);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
