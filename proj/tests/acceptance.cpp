// One PASS/FAIL line per acceptance criterion. Exit status 1 if any fails.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "support.hpp"
#include "tylr/bench.hpp"
#include "tylr/gen.hpp"

using namespace tylr;
using namespace tylr::testing;
namespace fs = std::filesystem;

namespace {

constexpr int kFuzzRuns = 10000;
constexpr int kFuzzMaxLen = 50;
constexpr std::uint64_t kFuzzSeed = 1;
constexpr double kFuzzSeconds = 60.0;
constexpr int kSoundRuns = 1000;
constexpr int kSoundDepth = 6;
constexpr std::uint64_t kSoundSeed = 1000;
constexpr int kMiniGrammars = 20;
constexpr std::uint64_t kMiniSeed = 2024;
constexpr int kOracleDepth = 6;
constexpr int kArgminSteps = 1000;
constexpr std::uint64_t kArgminSeed = 77;
constexpr int kPerfTokens = 1000;
constexpr double kPerfSeconds = 1.0;
constexpr double kMaxExponent = 2.5;

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  if (!ok) ++failures;
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Event> read_script(const fs::path& p) {
  std::ifstream in(p);
  std::vector<Event> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(Event::from_json(nlohmann::json::parse(line)));
  return out;
}

void golden_scripts() {
  fs::path dir = fs::path(TYLR_SOURCE_DIR) / "tests" / "golden";
  int scripts = 0, bad = 0;
  std::string first;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".jsonl") continue;
    ++scripts;
    fs::path want_path = entry.path();
    want_path.replace_extension(".json");
    std::ifstream in(want_path);
    if (!in) {
      ++bad;
      if (first.empty()) first = "missing " + want_path.filename().string();
      continue;
    }
    nlohmann::json want = nlohmann::json::parse(in);
    auto script = read_script(entry.path());
    auto models = run_script(hazel(), script);
    bool same = want.size() == models.size();
    for (size_t i = 0; same && i < models.size(); ++i)
      same = want[i]["model"] == models[i].to_json() && want[i]["text"] == models[i].text();
    if (!same) {
      ++bad;
      if (first.empty()) first = entry.path().filename().string();
    }
  }

  // Molding table for `(` right after `let`.
  const Grammar& g = hazel_grammar();
  Molder m(hazel());
  Stack k = m.step(Stack{}, {"let"});
  MoldChoice c;
  m.step(k, {"("}, &c);
  bool table = c.tile >= 0 && g.sorts[g.tiles[c.tile].sort] == "P" && c.delta.zero();
  for (const auto& cp : c.considered) {
    const TileDef& t = g.tiles[cp.tile];
    if (g.sorts[t.sort] == "E" && t.level == 5) table &= cp.plan.delta == Obligations{0, 0, 1, 1};
    if (g.sorts[t.sort] == "T") table &= cp.plan.delta == Obligations{0, 1, 0, 0};
  }
  std::ostringstream d;
  d << scripts << " scripts, " << bad << " mismatched" << (first.empty() ? "" : " (first: " + first + ")")
    << "; let-paren table " << (table ? "ok" : "wrong");
  report(bad == 0 && scripts > 0 && table, "golden scripts", d.str());
}

void ghost_maintenance() {
  const Relations& r = hazel();
  const Grammar& g = hazel_grammar();
  Parser p(r);
  auto t = [&](const std::string& label, const std::string& sort, int level = -1,
               const std::string& text = "", bool ghost = false) {
    return tok(g, tile_of(g, label, sort, level), text, ghost);
  };
  Token four = t("$num", "E", -1, "4");

  Stack a = p.push(Stack{}, t("let", "E"));
  a = p.push(a, t("=", "E"));
  a = p.push(a, t("in", "E", -1, "", true));
  a = p.push(a, four);
  a = p.push(a, t("in", "E"), true);
  std::string prefix = stack_to_string(r, a);
  bool ok1 = prefix == "⧏ ⋖ let ≐[⬚] = ≐[4] in";

  Stack b = p.push(Stack{}, t("(", "E", 5));
  b = p.push(b, t("$num", "E", -1, "2"));
  b = p.push(b, t(")", "E", 5, "", true));
  b = p.push(b, t(")", "E", 5), true);
  std::string suffix = stack_to_string(r, b);
  bool ok2 = suffix == "⧏ ⋖ ( ≐[2] )";

  report(ok1 && ok2, "ghost maintenance", "prefix ghost: " + prefix + "; suffix ghost: " + suffix);
}

}  // namespace

int main() {
  const Relations& r = hazel();

  {
    auto t0 = std::chrono::steady_clock::now();
    FuzzResult f = fuzz(r, kFuzzRuns, kFuzzMaxLen, kFuzzSeed, true);
    double secs = seconds_since(t0);
    std::ostringstream d;
    d << f.runs << " runs in " << secs << " s; exceptions " << f.exceptions << ", ill-formed terms "
      << f.bad_term << ", ill-formed stacks " << f.bad_stack;
    if (!f.first_failure.empty()) d << "; first: " << f.first_failure;
    report(f.exceptions == 0 && f.bad_term == 0 && f.bad_stack == 0 && secs <= kFuzzSeconds,
           "totality fuzz", d.str());
    report(f.not_completion == 0 && f.exceptions == 0, "completion only",
           std::to_string(f.not_completion) + " traces altered user tokens");
  }

  {
    SoundResult s = soundness(r, kSoundRuns, kSoundDepth, kSoundSeed, true);
    std::ostringstream d;
    d << s.runs << " programs; " << s.mismatches << " structural mismatches, " << s.nonzero
      << " with obligations";
    if (!s.first_failure.empty()) d << "; first: " << s.first_failure;
    report(s.mismatches == 0 && s.nonzero == 0, "soundness oracle", d.str());
  }

  {
    int hazel_fail = static_cast<int>(check_coherence(r).size());
    int lemma_fail = static_cast<int>(lemma_scan(r).size());
    int coh_fail = 0, oracle_fail = 0;
    std::mt19937_64 rng(kMiniSeed);
    for (int i = 0; i < kMiniGrammars; ++i) {
      Grammar g = load_grammar(random_grammar_json(rng));
      Relations mr(g);
      coh_fail += static_cast<int>(check_coherence(mr).size());
      lemma_fail += static_cast<int>(lemma_scan(mr).size());
      auto o = brute_relations(mr.elab, kOracleDepth);
      if (!std::equal(o.begin(), o.end(), mr.steps().begin(), mr.steps().end())) ++oracle_fail;
    }
    std::ostringstream d;
    d << "hazel " << hazel_fail << " failures; " << kMiniGrammars << " mini-grammars: " << coh_fail
      << " coherence failures, " << oracle_fail << " tables differing from derivations";
    report(hazel_fail == 0 && coh_fail == 0 && oracle_fail == 0, "precedence coherence", d.str());
    report(lemma_fail == 0, "lemma scans", std::to_string(lemma_fail) + " violations");
  }

  golden_scripts();
  ghost_maintenance();

  {
    ArgminResult a = argmin_check(r, kArgminSteps, kArgminSeed, true);
    std::ostringstream d;
    d << a.steps << " steps, " << a.violations << " violations";
    if (!a.first_failure.empty()) d << "; first: " << a.first_failure;
    report(a.violations == 0 && a.steps >= kArgminSteps, "molder argmin", d.str());
  }

  {
    Generator gen(r, 5);
    std::vector<InputToken> toks;
    for (const auto& t : gen.sized(kPerfTokens).tokens) toks.push_back({t.text});
    Molder m(r);
    auto t0 = std::chrono::steady_clock::now();
    m.run(toks);
    double secs = seconds_since(t0);
    BenchResult b = bench_parse(r, {250, 500, 1000, 2000}, 0, 1);
    std::ostringstream d;
    d << toks.size() << " tokens in " << secs << " s; exponent " << b.exponent;
    report(secs < kPerfSeconds && b.exponent <= kMaxExponent, "performance", d.str());
  }

  return failures == 0 ? 0 : 1;
}
