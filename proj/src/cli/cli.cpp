#include "sca/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "sca/ppt_pfa.hpp"
#include "sca/simulation.hpp"
#include "sca/symbolic.hpp"
#include "sca/weighted.hpp"

namespace sca::cli {

using nlohmann::json;

std::string to_string(Status s) {
  switch (s) {
    case Status::True: return "true";
    case Status::False: return "false";
    case Status::Error: return "error";
    case Status::ResourceExhausted: return "resource-exhausted";
  }
  return "error";
}

int exit_code(Status s) {
  switch (s) {
    case Status::True: return 0;
    case Status::False: return 1;
    case Status::Error: return 2;
    case Status::ResourceExhausted: return 3;
  }
  return 2;
}

json CommandResult::to_json() const {
  return {{"command", command}, {"status", cli::to_string(status)}, {"payload", payload},
          {"timing_ms", timing_ms}};
}

namespace {

struct Outcome {
  Status status = Status::True;
  json payload = json::object();
  std::string summary;
};

Outcome verdict(bool answer, json payload, std::string summary) {
  return {answer ? Status::True : Status::False, std::move(payload), std::move(summary)};
}

// Inline JSON when the argument starts with '{', otherwise a file path.
std::string read_document(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && arg[first] == '{') return arg;
  std::ifstream in(arg, std::ios::binary);
  if (!in) throw Error("cannot read " + arg);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

json parse_json(const std::string& arg) {
  try {
    return json::parse(read_document(arg));
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

std::string str(const Rational& r) { return sca::to_string(r); }

json word_json(const Alphabet& alph, const Word& w) {
  return {{"word", alph.format(w.symbols)}, {"offset", w.offset}};
}

json pair_word_json(const Alphabet& states, const PairWord& m) {
  Symbols in, out;
  for (const auto& [x, y] : m.body) {
    in.push_back(x);
    out.push_back(y);
  }
  return {{"prologue", states.format(m.prologue)}, {"inputs", states.format(in)},
          {"outputs", states.format(out)}};
}

json lasso_json(const Alphabet& states, const LassoWitness& w) {
  auto seg = [&](const LassoWitness::Segment& s) {
    return json{{"c1", states.format(s.c1)}, {"c2", states.format(s.c2)}, {"out", states.format(s.out)}};
  };
  return {{"left", seg(w.left)}, {"middle", seg(w.middle)}, {"right", seg(w.right)}, {"lag", w.lag}};
}

json injection_json(const Injection& i, const Alphabet& host) {
  json map = json::object();
  for (Symbol s = 0; s < i.source.size(); ++s) map[i.source.token(s)] = host.token(i.image.at(s));
  return map;
}

json surjection_json(const Surjection& p, const Alphabet& source) {
  json map = json::object();
  for (Symbol s = 0; s < source.size(); ++s) map[source.token(s)] = p.target.token(p.image.at(s));
  return map;
}

// States of `host` listed in `text`, in the listed order.
Injection parse_injection(const std::string& text, const Alphabet& host) {
  Injection i;
  i.image = host.parse(text);
  std::vector<std::string> tokens;
  for (Symbol s : i.image) tokens.push_back(host.token(s));
  i.source = Alphabet(tokens);
  return i;
}

// JSON object source token -> target token; target order is `order` when
// given, else first appearance along the source alphabet.
Surjection parse_surjection(const std::string& arg, const Alphabet& source,
                            const std::optional<Alphabet>& order) {
  const json map = parse_json(arg);
  if (!map.is_object()) throw ParseError("projection map must be a JSON object");
  std::vector<std::string> images;
  for (const auto& tok : source.tokens()) {
    if (!map.contains(tok)) throw ParseError("projection map misses state " + tok);
    images.push_back(map.at(tok).get<std::string>());
  }
  for (const auto& [key, _] : map.items())
    if (!source.find(key)) throw ParseError("projection map names unknown state " + key);
  Surjection p;
  if (order) {
    p.target = *order;
  } else {
    std::vector<std::string> seen;
    for (const auto& t : images)
      if (std::find(seen.begin(), seen.end(), t) == seen.end()) seen.push_back(t);
    p.target = Alphabet(seen);
  }
  for (const auto& t : images) p.image.push_back(p.target.index(t));
  return p;
}

json ppt_json(const Alphabet& states, const PptResult& r) {
  json out{{"answer", r.answer}, {"summary", r.summary}};
  if (r.k_bound) out["k_bound"] = *r.k_bound;
  if (r.witness) {
    const auto& w = *r.witness;
    json wj{{"n", w.n}, {"probability", str(w.probability)}, {"threshold", str(w.threshold)}};
    if (!w.window.empty()) wj["window"] = states.format(w.window);
    if (w.loop)
      wj["loop"] = {{"prefix", states.format(w.loop->prefix)}, {"anchor", states.format(w.loop->anchor)},
                    {"loop", states.format(w.loop->loop)}, {"suffix", states.format(w.loop->suffix)},
                    {"pumps", w.loop->pumps}, {"length", w.loop->length()}};
    out["witness"] = wj;
  }
  return out;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SCA_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ParseError(std::string("SCA_SEED is not an integer: ") + env);
    }
  }
  return 0;
}

// Options shared by every subcommand, filled in before the action runs.
struct Context {
  Budget budget;
  Sca load(const std::string& arg) const { return parse_sca_text(read_document(arg), budget); }
};

using Action = std::function<Outcome()>;

void add_core_commands(CLI::App& app, Context& ctx, Action& action) {
  {
    auto* sub = app.add_subcommand("prob", "Exact probability Pr{F^t(window) = target}");
    struct Opts { std::string sca, window, target; int t = 1; long woff = 0; std::optional<long> toff; };
    auto o = std::make_shared<Opts>();
    sub->add_option("--sca", o->sca, "SCA document")->required();
    sub->add_option("--window", o->window, "input word")->required();
    sub->add_option("--target", o->target, "output word")->required();
    sub->add_option("--t", o->t, "steps")->capture_default_str();
    sub->add_option("--window-offset", o->woff, "offset of the input word")->capture_default_str();
    sub->add_option("--target-offset", o->toff, "offset of the output word (default: window offset + k t)");
    sub->callback([&, o] {
      action = [&, o] {
        Sca a = ctx.load(o->sca);
        Word u{a.states().parse(o->window), o->woff};
        const long toff = o->toff.value_or(o->woff + static_cast<long>(a.radius()) * o->t);
        Word v{a.states().parse(o->target), toff};
        Rational p = cylinder_prob(a, u, v, o->t, ctx.budget);
        return Outcome{Status::True,
                       {{"value", str(p)}, {"window", word_json(a.states(), u)},
                        {"target", word_json(a.states(), v)}, {"t", o->t}},
                       "probability " + str(p)};
      };
    });
  }
  {
    auto* sub = app.add_subcommand("distribution", "Distribution of F^t on a window");
    struct Opts { std::string sca, window; int t = 1; long woff = 0; };
    auto o = std::make_shared<Opts>();
    sub->add_option("--sca", o->sca, "SCA document")->required();
    sub->add_option("--window", o->window, "input word")->required();
    sub->add_option("--t", o->t, "steps")->capture_default_str();
    sub->add_option("--window-offset", o->woff, "offset of the input word")->capture_default_str();
    sub->callback([&, o] {
      action = [&, o] {
        Sca a = ctx.load(o->sca);
        auto d = pushforward_distribution(a, Word{a.states().parse(o->window), o->woff}, o->t, ctx.budget);
        json support = json::array();
        for (const auto& [w, p] : d.support)
          support.push_back({{"word", a.states().format(w)}, {"probability", str(p)}});
        return Outcome{Status::True,
                       {{"offset", d.offset}, {"support", support}, {"total", str(d.total())}},
                       std::to_string(d.support.size()) + " output words"};
      };
    });
  }
  {
    auto* sub = app.add_subcommand("simulate", "Sample a space-time diagram on a periodic configuration");
    struct Opts { std::string sca, config, style = "text", output; int steps = 10; long phase = 0;
                  std::optional<std::uint64_t> seed; bool randomness = false; };
    auto o = std::make_shared<Opts>();
    sub->add_option("--sca", o->sca, "SCA document")->required();
    sub->add_option("--config", o->config, "period of the initial configuration")->required();
    sub->add_option("--phase", o->phase, "cell holding the first period symbol")->capture_default_str();
    sub->add_option("--steps", o->steps, "time steps")->capture_default_str();
    sub->add_option("--seed", o->seed, "sampling seed (default: SCA_SEED or 0)");
    sub->add_option("--style", o->style, "text or pgm")->capture_default_str();
    sub->add_option("--output", o->output, "write the rendered diagram to this file");
    sub->add_flag("--randomness", o->randomness, "include the sampled random rows");
    sub->callback([&, o] {
      action = [&, o] {
        Sca a = ctx.load(o->sca);
        const DiagramStyle style = parse_diagram_style(o->style);
        const std::uint64_t seed = o->seed ? *o->seed : default_seed();
        PeriodicConfig c{a.states().parse(o->config), o->phase};
        SpaceTime d = sample_diagram(a, c, o->steps, seed, o->randomness, ctx.budget);
        const std::string text = render_diagram(a.states(), d, DiagramStyle::Text);
        json payload{{"seed", seed}, {"steps", o->steps}};
        json rows = json::array();
        std::istringstream lines(text);
        for (std::string line; std::getline(lines, line);) rows.push_back(line);
        payload["rows"] = rows;
        if (o->randomness) {
          json rr = json::array();
          for (const auto& r : d.randomness_rows) rr.push_back(a.random().format(r.period));
          payload["randomness"] = rr;
        }
        if (!o->output.empty()) {
          std::ofstream out(o->output, std::ios::binary);
          if (!out) throw Error("cannot write " + o->output);
          out << render_diagram(a.states(), d, style);
          payload["output"] = o->output;
        }
        return Outcome{Status::True, payload, std::to_string(d.rows.size()) + " rows, seed " + std::to_string(seed)};
      };
    });
  }
  {
    auto* sub = app.add_subcommand("deterministic", "Is the rule independent of the random symbols?");
    auto sca = std::make_shared<std::string>();
    sub->add_option("--sca", *sca, "SCA document")->required();
    sub->callback([&, sca] {
      action = [&, sca] {
        Sca a = ctx.load(*sca);
        json payload{{"deterministic", is_deterministic(a)}};
        for (std::uint64_t qi = 0; qi < a.q_words() && !payload.contains("witness"); ++qi)
          for (std::uint64_t ri = 1; ri < a.r_words(); ++ri)
            if (a.at(qi, ri) != a.at(qi, 0)) {
              Symbols q(a.v().size()), r1(a.v_prime().size(), 0), r2(a.v_prime().size());
              word_from_index(qi, q.size(), a.states().size(), q.data());
              word_from_index(ri, r2.size(), a.random().size(), r2.data());
              payload["witness"] = {{"neighborhood", a.states().format(q)},
                                    {"random1", a.random().format(r1)}, {"random2", a.random().format(r2)},
                                    {"output1", a.states().token(a.at(qi, 0))},
                                    {"output2", a.states().token(a.at(qi, ri))}};
              break;
            }
        const bool det = payload["deterministic"];
        return verdict(det, payload, det ? "deterministic" : "not deterministic");
      };
    });
  }
  {
    auto* sub = app.add_subcommand("cfca", "Is the SCA correlation-free (V' = {0})?");
    auto sca = std::make_shared<std::string>();
    sub->add_option("--sca", *sca, "SCA document")->required();
    sub->callback([&, sca] {
      action = [&, sca] {
        Sca a = ctx.load(*sca);
        json payload{{"cfca", is_cfca(a)}, {"v_prime", a.v_prime()}};
        if (is_cfca(a)) {
          LocalDistribution ld = local_distribution(a);
          json rows = json::array();
          Symbols q(ld.rho);
          for (std::uint64_t qi = 0; qi < ld.table.size(); ++qi) {
            word_from_index(qi, q.size(), ld.q_size, q.data());
            json probs = json::object();
            for (Symbol s = 0; s < ld.q_size; ++s)
              if (ld.table[qi][s] != 0) probs[a.states().token(s)] = str(ld.table[qi][s]);
            rows.push_back({{"neighborhood", a.states().format(q)}, {"distribution", probs}});
          }
          payload["local_distribution"] = rows;
        }
        return verdict(is_cfca(a), payload, is_cfca(a) ? "CFCA" : "not a CFCA");
      };
    });
  }
  {
    auto* sub = app.add_subcommand("conserve", "Number conservation on small supports");
    struct Opts { std::string sca; int support = 3; int t = 1; };
    auto o = std::make_shared<Opts>();
    sub->add_option("--sca", o->sca, "SCA document")->required();
    sub->add_option("--support", o->support, "support bound")->capture_default_str();
    sub->add_option("--t", o->t, "steps")->capture_default_str();
    sub->callback([&, o] {
      action = [&, o] {
        Sca a = ctx.load(o->sca);
        auto v = conservation_check(a, o->support, o->t, ctx.budget);
        json payload{{"conserving", v.conserving}, {"support", o->support}, {"t", o->t}};
        if (!v.conserving) {
          json w{{"input", word_json(a.states(), v.input)}, {"output", word_json(a.states(), v.output)},
                 {"input_sum", v.input_sum}, {"output_sum", v.output_sum}, {"reason", v.reason}};
          if (v.other_output) w["other_output"] = word_json(a.states(), *v.other_output);
          payload["witness"] = w;
        }
        return verdict(v.conserving, payload, v.conserving ? "number-conserving" : "not number-conserving: " + v.reason);
      };
    });
  }
}

void add_equality_commands(CLI::App& app, Context& ctx, Action& action) {
  {
    auto* sub = app.add_subcommand("equal", "Equality of the stochastic global functions of F^t and G^t");
    struct Opts { std::string a, b; int t = 1; bool no_precheck = false; };
    auto o = std::make_shared<Opts>();
    sub->add_option("--a", o->a, "first SCA document")->required();
    sub->add_option("--b", o->b, "second SCA document")->required();
    sub->add_option("--t", o->t, "steps")->capture_default_str();
    sub->add_flag("--no-precheck", o->no_precheck, "skip the prime-factor short circuit");
    sub->callback([&, o] {
      action = [&, o] {
        Sca a = ctx.load(o->a), b = ctx.load(o->b);
        auto r = stochastic_equal_detail(a, b, o->t, !o->no_precheck, ctx.budget);
        json payload{{"equal", r.equal}, {"precheck", to_string(r.precheck)},
                     {"decided_by_precheck", r.decided_by_precheck}, {"radius", r.radius}, {"t", o->t}};
        if (r.witness) {
          payload["witness"] = pair_word_json(a.states(), *r.witness);
          payload["prob_a"] = str(r.prob_a);
          payload["prob_b"] = str(r.prob_b);
        }
        return verdict(r.equal, payload, r.equal ? "equal" : r.decided_by_precheck ? "differ (prime-factor precheck)" : "differ");
      };
    });
  }
  {
    auto* sub = app.add_subcommand("nd-equal", "Equality of the non-deterministic global functions");
    struct Opts { std::string a, b; int t = 1; };
    auto o = std::make_shared<Opts>();
    sub->add_option("--a", o->a, "first SCA document")->required();
    sub->add_option("--b", o->b, "second SCA document")->required();
    sub->add_option("--t", o->t, "steps")->capture_default_str();
    sub->callback([&, o] {
      action = [&, o] {
        Sca a = ctx.load(o->a), b = ctx.load(o->b);
        auto r = ndet_equal(a, b, o->t, ctx.budget);
        json payload{{"equal", r.answer}, {"t", o->t}};
        if (r.witness)
          payload["witness"] = {{"input", word_json(a.states(), r.witness->input)},
                                {"output", word_json(a.states(), r.witness->output)},
                                {"realized_by", r.witness_realized_by_a ? "a" : "b"}};
        return verdict(r.answer, payload, r.answer ? "equal" : "differ");
      };
    });
  }
  auto unary = [&](const char* name, const char* help,
                   std::function<Outcome(const Sca&, const Budget&)> run) {
    auto* sub = app.add_subcommand(name, help);
    auto sca = std::make_shared<std::string>();
    sub->add_option("--sca", *sca, "SCA document")->required();
    sub->callback([&, sca, run] { action = [&, sca, run] { return run(ctx.load(*sca), ctx.budget); }; });
  };
  unary("noisy", "Is every configuration reachable from every configuration?", [](const Sca& a, const Budget& b) {
    auto r = is_noisy(a, b);
    json payload{{"noisy", r.answer}};
    if (r.witness)
      payload["witness"] = {{"input", word_json(a.states(), r.witness->input)},
                            {"output", word_json(a.states(), r.witness->output)}};
    return verdict(r.answer, payload, r.answer ? "noisy" : "not noisy");
  });
  unary("surjective", "Surjectivity of the non-deterministic global function", [](const Sca& a, const Budget& b) {
    auto r = is_surjective(a, b);
    json payload{{"surjective", r.answer}};
    if (r.orphan) payload["orphan"] = a.states().format(*r.orphan);
    return verdict(r.answer, payload, r.answer ? "surjective" : "not surjective");
  });
  unary("injective", "Injectivity of the non-deterministic global function", [](const Sca& a, const Budget& b) {
    auto r = is_injective(a, b);
    json payload{{"injective", r.answer}};
    if (r.witness) payload["witness"] = lasso_json(a.states(), *r.witness);
    return verdict(r.answer, payload, r.answer ? "injective" : "not injective");
  });
  unary("preinjective", "Pre-injectivity of the non-deterministic global function", [](const Sca& a, const Budget& b) {
    auto r = is_preinjective(a, b);
    json payload{{"preinjective", r.answer}};
    if (r.witness) payload["witness"] = lasso_json(a.states(), *r.witness);
    return verdict(r.answer, payload, r.answer ? "pre-injective" : "not pre-injective");
  });
}

void add_ppt_commands(CLI::App& app, Context& ctx, Action& action) {
  for (const bool cfca : {true, false}) {
    auto* sub = app.add_subcommand(cfca ? "ppt-cfca" : "ppt-sca",
                                   cfca ? "Pattern probability threshold for a CFCA (exponential threshold)"
                                        : "Pattern probability threshold for an SCA (superexponential threshold)");
    struct Opts { std::string sca, x, y, z, threshold; };
    auto o = std::make_shared<Opts>();
    sub->add_option("--sca", o->sca, "SCA document")->required();
    sub->add_option("--x", o->x, "left state")->required();
    sub->add_option("--y", o->y, "repeated state")->required();
    sub->add_option("--z", o->z, "right state")->required();
    sub->add_option("--threshold", o->threshold, "exp:alpha,lambda or sup:theta,c,d")->required();
    sub->callback([&, o, cfca] {
      action = [&, o, cfca] {
        Sca a = ctx.load(o->sca);
        const Threshold th = Threshold::parse(o->threshold);
        const Symbol x = a.states().index(o->x), y = a.states().index(o->y), z = a.states().index(o->z);
        PptResult r = cfca ? ppt_decide_cfca(a, x, y, z, th, ctx.budget) : ppt_decide_sca(a, x, y, z, th, ctx.budget);
        json payload = ppt_json(a.states(), r);
        payload["threshold"] = th.describe();
        return verdict(r.answer, payload, r.summary);
      };
    });
  }
  {
    auto* sub = app.add_subcommand("pfa-prob", "Acceptance probability of a word by a PFA");
    struct Opts { std::string pfa, word; };
    auto o = std::make_shared<Opts>();
    sub->add_option("--pfa", o->pfa, "PFA document")->required();
    sub->add_option("--word", o->word, "input word (empty allowed)")->required();
    sub->callback([&, o] {
      action = [&, o] {
        Pfa p = parse_pfa(parse_json(o->pfa));
        Symbols u = o->word.empty() ? Symbols{} : p.alphabet.parse(o->word);
        Rational v = pfa_accept_prob(p, u);
        return Outcome{Status::True, {{"value", str(v)}, {"word", p.alphabet.format(u)}}, "probability " + str(v)};
      };
    });
  }
  {
    auto* sub = app.add_subcommand("encode-pfa", "SCA whose pattern probabilities encode a PFA");
    auto pfa = std::make_shared<std::string>();
    sub->add_option("--pfa", *pfa, "PFA document")->required();
    sub->callback([&, pfa] {
      action = [&, pfa] {
        Sca s = encode_pfa(parse_pfa(parse_json(*pfa)), ctx.budget);
        return Outcome{Status::True, {{"sca", to_json(s)}},
                       std::to_string(s.states().size()) + " states, " + std::to_string(s.random().size()) + " random symbols"};
      };
    });
  }
}

Outcome sca_outcome(const Sca& s, json extra = json::object()) {
  extra["sca"] = to_json(s);
  return {Status::True, extra,
          std::to_string(s.states().size()) + " states, " + std::to_string(s.random().size()) + " random symbols"};
}

void add_simulation_commands(CLI::App& app, Context& ctx, Action& action) {
  {
    auto* sub = app.add_subcommand("rescale", "Rescaling <m,t,z>: pack m cells, iterate t steps, shift z");
    struct Opts { std::string sca, params; };
    auto o = std::make_shared<Opts>();
    sub->add_option("--sca", o->sca, "SCA document")->required();
    sub->add_option("--params", o->params, "m,t,z")->required();
    sub->callback([&, o] {
      action = [&, o] {
        const RescaleParams p = RescaleParams::parse(o->params);
        return sca_outcome(rescale_sca(ctx.load(o->sca), p, ctx.budget), {{"params", p.str()}});
      };
    });
  }
  {
    auto* sub = app.add_subcommand("restrict", "Restriction to a stable set of states");
    struct Opts { std::string sca, states; };
    auto o = std::make_shared<Opts>();
    sub->add_option("--sca", o->sca, "SCA document")->required();
    sub->add_option("--states", o->states, "kept states")->required();
    sub->callback([&, o] {
      action = [&, o] {
        Sca a = ctx.load(o->sca);
        const Injection i = parse_injection(o->states, a.states());
        try {
          return sca_outcome(check_restriction(a, i, ctx.budget));
        } catch (const StabilityError& e) {
          return verdict(false,
                         {{"witness", {{"neighborhood", i.source.format(e.neighborhood)},
                                       {"random", a.random().format(e.random)}}}},
                         e.what());
        }
      };
    });
  }
  {
    auto* sub = app.add_subcommand("project", "Projection along a compatible state map");
    struct Opts { std::string sca, map, target; };
    auto o = std::make_shared<Opts>();
    sub->add_option("--sca", o->sca, "SCA document")->required();
    sub->add_option("--map", o->map, "JSON object (inline or file) from states to target states")->required();
    sub->add_option("--target", o->target, "target state order");
    sub->callback([&, o] {
      action = [&, o] {
        Sca a = ctx.load(o->sca);
        std::optional<Alphabet> order;
        if (!o->target.empty()) {
          std::istringstream in(o->target);
          std::vector<std::string> tokens;
          for (std::string t; in >> t;) tokens.push_back(t);
          order = Alphabet(tokens);
        }
        const Surjection p = parse_surjection(o->map, a.states(), order);
        try {
          return sca_outcome(check_projection(a, p, ctx.budget));
        } catch (const CompatibilityError& e) {
          return verdict(false,
                         {{"witness", {{"first", a.states().format(e.first)}, {"second", a.states().format(e.second)},
                                       {"random", a.random().format(e.random)}}}},
                         e.what());
        }
      };
    });
  }
  {
    auto* sub = app.add_subcommand("simulates", "Check one simulation witness");
    struct Opts { std::string a, b, pa = "1,1,0", pb = "1,1,0", mode = "S", restrict, project; };
    auto o = std::make_shared<Opts>();
    sub->add_option("--a", o->a, "simulated SCA document")->required();
    sub->add_option("--b", o->b, "simulating SCA document")->required();
    sub->add_option("--pa", o->pa, "rescaling of a (m,t,z)")->capture_default_str();
    sub->add_option("--pb", o->pb, "rescaling of b (m,t,z)")->capture_default_str();
    sub->add_option("--mode", o->mode, "D, N or S")->capture_default_str();
    sub->add_option("--restrict", o->restrict, "states of the rescaled b to keep");
    sub->add_option("--project", o->project, "JSON map from (restricted) states of the rescaled b to states of a");
    sub->callback([&, o] {
      action = [&, o] {
        Sca a = ctx.load(o->a), b = ctx.load(o->b);
        const RescaleParams pa = RescaleParams::parse(o->pa), pb = RescaleParams::parse(o->pb);
        const SimMode mode = parse_sim_mode(o->mode);
        Trim trim;
        Alphabet trimmed = rescale_sca(b, pb, ctx.budget).states();
        if (!o->restrict.empty()) {
          trim.restriction = parse_injection(o->restrict, trimmed);
          trimmed = trim.restriction->source;
        }
        if (!o->project.empty()) trim.projection = parse_surjection(o->project, trimmed, std::nullopt);
        auto r = check_simulation(a, b, pa, pb, trim, mode, ctx.budget);
        return verdict(r.holds,
                       {{"holds", r.holds}, {"decided_by_precheck", r.decided_by_precheck}, {"detail", r.detail},
                        {"pa", pa.str()}, {"pb", pb.str()}, {"mode", to_string(mode)}},
                       r.detail);
      };
    });
  }
  {
    auto* sub = app.add_subcommand("search-sim", "Bounded search for a simulation witness");
    struct Opts { std::string a, b, mode = "S"; SearchBounds bounds; };
    auto o = std::make_shared<Opts>();
    sub->add_option("--a", o->a, "simulated SCA document")->required();
    sub->add_option("--b", o->b, "simulating SCA document")->required();
    sub->add_option("--mode", o->mode, "D, N or S")->capture_default_str();
    sub->add_option("--max-m", o->bounds.max_m, "largest block size")->capture_default_str();
    sub->add_option("--max-t", o->bounds.max_t, "largest step count")->capture_default_str();
    sub->add_option("--max-z", o->bounds.max_z, "largest |shift|")->capture_default_str();
    sub->add_option("--max-trims", o->bounds.max_trims, "trims tried per parameter pair")->capture_default_str();
    sub->callback([&, o] {
      action = [&, o] {
        Sca a = ctx.load(o->a), b = ctx.load(o->b);
        auto r = search_simulation(a, b, o->bounds, parse_sim_mode(o->mode), ctx.budget);
        json payload{{"found", r.witness.has_value()}, {"conclusive", r.witness.has_value() || r.precheck_short_circuit},
                     {"precheck_short_circuit", r.precheck_short_circuit}, {"checked", r.checked}, {"detail", r.detail}};
        if (r.witness) {
          const auto& w = *r.witness;
          json wj{{"pa", w.pa.str()}, {"pb", w.pb.str()}};
          Alphabet trimmed = rescale_sca(b, w.pb, ctx.budget).states();
          if (w.trim.restriction) {
            wj["restriction"] = injection_json(*w.trim.restriction, trimmed);
            trimmed = w.trim.restriction->source;
          }
          if (w.trim.projection) wj["projection"] = surjection_json(*w.trim.projection, trimmed);
          payload["witness"] = wj;
        }
        return verdict(r.witness.has_value(), payload, r.detail);
      };
    });
  }
  {
    auto* sub = app.add_subcommand("cfca-host", "CFCA over Q and Q x R simulating the SCA in two steps");
    auto sca = std::make_shared<std::string>();
    sub->add_option("--sca", *sca, "SCA document")->required();
    sub->callback([&, sca] {
      action = [&, sca] {
        Host h = cfca_host(ctx.load(*sca), ctx.budget);
        return sca_outcome(h.sca, {{"embedding", injection_json(h.embedding, h.sca.states())},
                                   {"simulation", {{"pa", "1,1,0"}, {"pb", "1,2,0"}}}});
      };
    });
  }
  {
    auto* sub = app.add_subcommand("coupling", "Finite coupling of two SCA on a centred window");
    struct Opts { std::string a, b, window; int n = 0; };
    auto o = std::make_shared<Opts>();
    sub->add_option("--a", o->a, "first SCA document")->required();
    sub->add_option("--b", o->b, "second SCA document")->required();
    sub->add_option("--window", o->window, "input window of length 2(n+k)+1")->required();
    sub->add_option("--n", o->n, "half-width of the coupled output")->capture_default_str();
    sub->callback([&, o] {
      action = [&, o] {
        Sca a = ctx.load(o->a), b = ctx.load(o->b);
        auto r = build_finite_coupling(a, b, a.states().parse(o->window), o->n, ctx.budget);
        if (!r.table)
          return verdict(false,
                         {{"mismatch", r.mismatch ? json(a.states().format(*r.mismatch)) : json()},
                          {"prob_a", str(r.prob_a)}, {"prob_b", str(r.prob_b)}},
                         "no coupling: output distributions differ");
        const auto& t = *r.table;
        json entries = json::array();
        for (const auto& e : t.entries)
          entries.push_back({{"r1", a.random().format(e.r1)}, {"r2", b.random().format(e.r2)}, {"mass", str(e.mass)}});
        return verdict(true,
                       {{"window", a.states().format(t.window)}, {"n", t.n}, {"radius", t.radius}, {"entries", entries},
                        {"marginals_uniform", t.marginals_uniform}, {"equal_output_mass", str(t.equal_output_mass)}},
                       std::to_string(t.entries.size()) + " coupling entries");
      };
    });
  }
  {
    auto* sub = app.add_subcommand("gadget", "Reduction gadgets of a deterministic CA");
    struct Opts { std::string sca, kind; };
    auto o = std::make_shared<Opts>();
    sub->add_option("--sca", o->sca, "deterministic SCA document")->required();
    sub->add_option("--kind", o->kind, "lift (surjectivity lift) or square (square noise)")->required();
    sub->callback([&, o] {
      action = [&, o] { return sca_outcome(gadget(parse_gadget_kind(o->kind), ctx.load(o->sca), ctx.budget)); };
    });
  }
}

}  // namespace

CommandResult run(const std::vector<std::string>& args) {
  const auto start = std::chrono::steady_clock::now();
  CommandResult result;
  CLI::App app{"Exact-arithmetic lab for one-dimensional stochastic cellular automata", "sca"};
  app.require_subcommand(1);
  app.fallthrough();
  Context ctx;
  app.add_option("--max-table", ctx.budget.max_table, "rule table entries")->capture_default_str();
  app.add_option("--max-enum", ctx.budget.max_enum, "enumerated words and paths")->capture_default_str();
  app.add_option("--max-states", ctx.budget.max_states, "automaton and subset states")->capture_default_str();
  Action action;
  add_core_commands(app, ctx, action);
  add_equality_commands(app, ctx, action);
  add_ppt_commands(app, ctx, action);
  add_simulation_commands(app, ctx, action);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  auto finish = [&](Status s, json payload, std::string summary) {
    result.status = s;
    result.payload = std::move(payload);
    result.summary = std::move(summary);
    result.timing_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
  };
  auto help_text = [&] {
    auto subs = app.get_subcommands();
    return subs.empty() ? app.help() : subs.front()->help();
  };
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    result.command = "help";
    return finish(Status::True, {{"help", help_text()}}, help_text());
  } catch (const CLI::ParseError& e) {
    auto subs = app.get_subcommands();
    result.command = subs.empty() ? "" : subs.front()->get_name();
    return finish(Status::Error, {{"error", e.what()}, {"kind", "usage"}},
                  std::string(e.what()) + "\n" + help_text());
  }
  result.command = app.get_subcommands().front()->get_name();
  try {
    Outcome o = action();
    return finish(o.status, std::move(o.payload), std::move(o.summary));
  } catch (const ResourceExhausted& e) {
    return finish(Status::ResourceExhausted, {{"error", e.what()}, {"kind", "resource"}}, e.what());
  } catch (const Error& e) {
    return finish(Status::Error, {{"error", e.what()}, {"kind", "input"}}, e.what());
  } catch (const nlohmann::json::exception& e) {
    return finish(Status::Error, {{"error", e.what()}, {"kind", "input"}}, e.what());
  }
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CommandResult r = run(args);
  out << r.to_json().dump(2) << "\n";
  err << (r.command.empty() ? "sca" : r.command) << ": " << to_string(r.status) << ": " << r.summary << "\n";
  return exit_code(r.status);
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return dispatch(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace sca::cli
