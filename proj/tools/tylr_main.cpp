#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "tylr/bench.hpp"
#include "tylr/editor.hpp"
#include "tylr/gen.hpp"
#include "tylr/serialize.hpp"

using namespace tylr;
using nlohmann::json;

namespace {

struct Opts {
  std::string grammar;
  std::string format = "text";
  bool ascii = false;
  bool trace = false;
  std::uint64_t seed = 1;
};

std::unique_ptr<Grammar> load(const Opts& o) {
  std::string path = o.grammar;
  if (path.empty())
    if (const char* env = std::getenv("TYLR_GRAMMAR")) path = env;
  if (path.empty()) throw GrammarError("no grammar: pass --grammar or set TYLR_GRAMMAR");
  auto g = std::make_unique<Grammar>(path == "builtin:hazel" ? builtin_hazel()
                                                             : load_grammar_file(path));
  auto vs = validate(*g);
  if (!vs.empty()) {
    std::ostringstream os;
    for (const auto& v : vs) os << v.rule << ": " << v.witness << "\n";
    throw GrammarError(os.str());
  }
  return g;
}

std::string read_input(const std::string& path) {
  std::stringstream ss;
  if (path.empty() || path == "-") {
    ss << std::cin.rdbuf();
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    ss << in.rdbuf();
  }
  return ss.str();
}

int cmd_parse(const Opts& o, const std::string& input) {
  auto g = load(o);
  Relations r(*g);
  std::string src = read_input(input);
  Editor ed(r);
  ed.load(src);
  if (o.trace || o.format == "debug") {
    std::vector<InputToken> toks;
    for (const auto& it : ed.st.items)
      if (it.kind == Item::Kind::kToken) toks.push_back({it.text, false, -1, -1, it.uid, false});
    ParseRun run = ed.molder.run(toks, true);
    for (size_t i = 0; i < toks.size(); ++i) {
      if (o.trace) std::cerr << choice_json(r, toks[i], run.choices[i]) << "\n";
      if (o.format == "debug")
        std::cout << "push " << toks[i].text << "  " << stack_to_string(r, run.stacks[i], o.ascii)
                  << "\n";
    }
    if (o.format == "debug") {
      std::cout << term_debug(r.elab, run.term) << "\n";
      return 0;
    }
  }
  if (o.format == "json") {
    std::cout << term_json(r.elab, ed.term()).dump() << "\n";
  } else if (o.format == "text") {
    std::cout << ed.render().text(o.ascii) << "\n";
  }
  return 0;
}

int cmd_relations(const Opts& o, bool dot) {
  auto g = load(o);
  Relations r(*g);
  std::cout << (dot ? relations_dot(r) : relations_tsv(r));
  return 0;
}

int cmd_elab(const Opts& o, int max_len) {
  auto g = load(o);
  Relations r(*g);
  std::cout << dump_cfg(r.elab, max_len);
  return 0;
}

int cmd_coherence(const Opts& o) {
  auto g = load(o);
  Relations r(*g);
  auto fs = check_coherence(r);
  auto vs = lemma_scan(r);
  for (const auto& f : fs) std::cout << "coherence: " << f.what << "\n";
  for (const auto& v : vs) std::cout << v.rule << ": " << v.witness << "\n";
  if (fs.empty() && vs.empty()) std::cout << "ok\n";
  return fs.empty() && vs.empty() ? 0 : 1;
}

json render_msg(Editor& ed) { return {{"type", "render"}, {"model", ed.render().to_json()}}; }

Event event_of(const json& j) { return Event::from_json(j.contains("event") ? j.at("event") : j); }

int cmd_session(const Opts& o, const std::string& script) {
  auto g = load(o);
  Relations r(*g);
  std::string text = read_input(script);
  Editor ed(r);
  std::cout << render_msg(ed).dump() << "\n";
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Event ev;
    try {
      ev = event_of(json::parse(line));
    } catch (const std::exception& e) {
      std::cerr << "line " << n << ": " << e.what() << "\n";
      return 2;
    }
    ed.apply(ev);
    std::cout << render_msg(ed).dump() << "\n";
  }
  return 0;
}

json hello() { return {{"type", "hello"}, {"v", 1}}; }

json handle(Editor& ed, const std::string& line) {
  try {
    json j = json::parse(line);
    if (j.value("type", "event") == "hello") return hello();
    ed.apply(event_of(j));
    return render_msg(ed);
  } catch (const std::exception& e) {
    return {{"type", "error"}, {"message", e.what()}};
  }
}

int cmd_serve(const Opts& o, int port, bool stdio) {
  auto g = load(o);
  Relations r(*g);
  if (stdio || port <= 0) {
    Editor ed(r);
    std::cout << hello().dump() << "\n" << render_msg(ed).dump() << std::endl;
    std::string line;
    while (std::getline(std::cin, line)) {
      if (line.empty()) continue;
      std::cout << handle(ed, line).dump() << std::endl;
    }
    return 0;
  }

  struct Session {
    std::mutex mu;
    std::unique_ptr<Editor> ed;
  };
  std::mutex mu;
  std::map<int, std::shared_ptr<Session>> sessions;
  int next = 1;

  httplib::Server svr;
  svr.Post("/session", [&](const httplib::Request&, httplib::Response& res) {
    auto s = std::make_shared<Session>();
    s->ed = std::make_unique<Editor>(r);
    int id;
    {
      std::lock_guard<std::mutex> l(mu);
      id = next++;
      sessions[id] = s;
    }
    json out = hello();
    out["session"] = id;
    out["render"] = render_msg(*s->ed);
    res.set_content(out.dump(), "application/json");
  });
  svr.Post(R"(/session/(\d+))", [&](const httplib::Request& req, httplib::Response& res) {
    std::shared_ptr<Session> s;
    {
      std::lock_guard<std::mutex> l(mu);
      auto it = sessions.find(std::stoi(req.matches[1]));
      if (it != sessions.end()) s = it->second;
    }
    if (!s) {
      res.status = 404;
      res.set_content(json{{"type", "error"}, {"message", "no such session"}}.dump(),
                      "application/json");
      return;
    }
    std::lock_guard<std::mutex> l(s->mu);
    res.set_content(handle(*s->ed, req.body).dump(), "application/json");
  });
  std::cerr << "listening on 127.0.0.1:" << port << "\n";
  return svr.listen("127.0.0.1", port) ? 0 : 2;
}

int cmd_bench(const Opts& o, const std::vector<int>& sizes, int edits) {
  auto g = load(o);
  Relations r(*g);
  BenchResult res = bench_parse(r, sizes, edits, o.seed);
  std::cout << "size,parse_ms,edit_ms\n";
  for (const auto& row : res.rows)
    std::cout << row.size << "," << row.parse_ms << "," << row.edit_ms << "\n";
  if (res.rows.size() >= 2) std::cout << "# exponent " << res.exponent << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tylr: grammar-driven structure editing with obligations"};
  app.require_subcommand(1);
  Opts o;
  auto common = [&](CLI::App* c) {
    c->add_option("--grammar", o.grammar, "grammar JSON path, or builtin:hazel");
    c->add_flag("--ascii", o.ascii, "ASCII glyphs");
  };

  std::string input;
  auto* parse = app.add_subcommand("parse", "parse and repair a token stream");
  common(parse);
  parse->add_option("input", input, "source file, - for stdin");
  parse->add_option("--format", o.format, "json, text or debug")
      ->check(CLI::IsMember({"json", "text", "debug"}));
  parse->add_flag("--trace", o.trace, "one JSON line per molding choice on stderr");

  bool dot = false;
  auto* rels = app.add_subcommand("relations", "dump precedence relations");
  common(rels);
  rels->add_flag("--dot", dot, "graph description instead of TSV");

  int max_len = 6;
  auto* elab = app.add_subcommand("elab", "dump the elaborated grammar");
  common(elab);
  elab->add_option("--max-len", max_len, "longest production listed");

  auto* coh = app.add_subcommand("coherence", "check relation coherence and structural lemmas");
  common(coh);

  auto* val = app.add_subcommand("validate", "validate a grammar");
  common(val);

  std::string script;
  auto* sess = app.add_subcommand("session", "replay an event script");
  common(sess);
  sess->add_option("script", script, "event JSON lines, - for stdin");

  int port = 0;
  bool stdio = false;
  auto* serve = app.add_subcommand("serve", "serve the session protocol");
  common(serve);
  serve->add_option("--port", port, "HTTP port");
  serve->add_flag("--stdio", stdio, "line-delimited JSON on stdin/stdout");

  std::vector<int> sizes = {250, 500, 1000, 2000};
  int edits = 20;
  auto* bench = app.add_subcommand("bench", "time batch parsing and local edits");
  common(bench);
  bench->add_option("--sizes", sizes, "token counts")->delimiter(',');
  bench->add_option("--edits", edits, "edits timed per size");
  bench->add_option("--seed", o.seed, "generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*parse) return cmd_parse(o, input);
    if (*rels) return cmd_relations(o, dot);
    if (*elab) return cmd_elab(o, max_len);
    if (*coh) return cmd_coherence(o);
    if (*val) {
      load(o);
      std::cout << "ok\n";
      return 0;
    }
    if (*sess) return cmd_session(o, script);
    if (*serve) return cmd_serve(o, port, stdio);
    if (*bench) return cmd_bench(o, sizes, edits);
  } catch (const GrammarError& e) {
    std::cerr << "grammar error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
