#include "prefregret/service.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>

#include "httplib.h"
#include "prefregret/core_model.hpp"
#include "prefregret/environment_factory.hpp"
#include "prefregret/rng.hpp"

namespace prefregret::service {

namespace fs = std::filesystem;

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string new_session_id() {
  static std::mutex mutex;
  static std::random_device device;
  std::lock_guard lock(mutex);
  const std::uint64_t hi = (static_cast<std::uint64_t>(device()) << 32) | device();
  const std::uint64_t lo = (static_cast<std::uint64_t>(device()) << 32) | device();
  return hex64(hi) + hex64(lo);
}

bool valid_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    if (!std::isalnum(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

/// Deterministic in (session, iteration) so a rebuilt session re-issues the same nonce.
std::string nonce_for(const Session& s) {
  const std::uint64_t h = std::hash<std::string>{}(s.id);
  return hex64(mix_seed(h, s.learner->iteration() + 1));
}

LearnerConfig learner_config(const nlohmann::json& learn) {
  if (!learn.is_object()) throw ConfigError("learn", "expected an object");
  LearnerConfig c;
  try {
    if (learn.contains("selector")) c.selector = parse_selector(learn.at("selector").get<std::string>());
    c.user_p = learn.value("p", c.user_p);
    c.iterations = learn.value("iterations", c.iterations);
    c.omega_size = learn.value("omega_size", c.omega_size);
    c.seed = learn.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("learn", e.what());
  }
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("learn." + e.field(), e.what());
  }
  return c;
}

double posterior_entropy(const BeliefState& belief) {
  double h = 0.0;
  for (double m : belief.masses()) {
    if (m > 0.0) h -= m * std::log2(m);
  }
  return h;
}

double top_mass(const BeliefState& belief) {
  double top = 0.0;
  for (double m : belief.masses()) top = std::max(top, m);
  return top;
}

nlohmann::json envelope(nlohmann::json body) {
  body["schema_version"] = kSchemaVersion;
  return body;
}

void refresh_status(Session& s) {
  if (s.learner->finished()) s.status = SessionStatus::Finished;
}

void build_learner(Session& s) {
  const nlohmann::json& req = s.request;
  if (!req.is_object()) throw ConfigError("request", "expected a JSON object");
  if (!req.contains("environment")) throw ConfigError("environment", "missing");
  std::shared_ptr<const Environment> env = make_environment(req.at("environment"));
  const LearnerConfig config = learner_config(req.value("learn", nlohmann::json::object()));
  if (req.contains("demo_user")) {
    std::vector<double> w;
    try {
      w = req.at("demo_user").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("demo_user", e.what());
    }
    if (w.size() != env->dimension()) throw ConfigError("demo_user", "dimension differs from environment");
    if (!(norm(WeightVector(w)) > 0.0)) throw ConfigError("demo_user", "zero weight");
    s.demo_user = WeightVector(std::move(w));
  }
  s.learner = std::make_unique<Learner>(std::move(env), config);
}

Choice parse_choice(const std::string& c) {
  if (c == "first") return Choice::First;
  if (c == "second") return Choice::Second;
  throw ServiceError(400, "choice must be 'first' or 'second'");
}

}  // namespace

const char* to_string(SessionStatus status) {
  switch (status) {
    case SessionStatus::Active: return "active";
    case SessionStatus::Converged: return "converged";
    case SessionStatus::Finished: return "finished";
  }
  return "?";
}

SessionStore::SessionStore(fs::path data_dir) : data_dir_(std::move(data_dir)) {
  if (!data_dir_.empty()) fs::create_directories(data_dir_);
}

std::shared_ptr<SessionStore::Slot> SessionStore::find(const std::string& id) const {
  std::shared_lock lock(registry_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(404, "unknown session '" + id + "'");
  return it->second;
}

std::size_t SessionStore::size() const {
  std::shared_lock lock(registry_mutex_);
  return sessions_.size();
}

void SessionStore::persist(const Session& s) const {
  if (data_dir_.empty()) return;
  const nlohmann::json snap = envelope({{"id", s.id},
                                        {"request", s.request},
                                        {"answers", s.answers},
                                        {"status", to_string(s.status)}});
  const fs::path target = data_dir_ / (s.id + ".json");
  const fs::path tmp = data_dir_ / (s.id + ".json.tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << snap.dump(2) << '\n';
    if (!out) throw ServiceError(500, "failed to write snapshot for session " + s.id);
  }
  fs::rename(tmp, target);
}

void SessionStore::rebuild(Session& s) {
  build_learner(s);
  for (const std::string& a : s.answers) {
    const Selection& sel = s.learner->pending();
    if (!sel.pair) throw ContractViolation("snapshot replay: answer recorded after convergence");
    s.learner->answer(parse_choice(a));
  }
  refresh_status(s);
}

nlohmann::json SessionStore::create(const nlohmann::json& request) {
  auto slot = std::make_shared<Slot>();
  Session& s = slot->session;
  s.id = new_session_id();
  s.request = request;
  build_learner(s);
  {
    std::lock_guard session_lock(slot->mutex);
    persist(s);
    std::unique_lock lock(registry_mutex_);
    sessions_.emplace(s.id, slot);
  }
  return envelope({{"id", s.id}, {"hypotheses", s.learner->belief().size()}});
}

nlohmann::json SessionStore::next_query(const std::string& id) {
  auto slot = find(id);
  std::lock_guard lock(slot->mutex);
  Session& s = slot->session;
  nlohmann::json out = {{"id", s.id},
                        {"iteration", s.learner->iteration()},
                        {"iterations", s.learner->config().iterations}};
  if (s.status == SessionStatus::Active) {
    const Selection& sel = s.learner->pending();
    if (!sel.pair) {
      s.status = SessionStatus::Converged;
      persist(s);
    } else {
      s.pending_nonce = nonce_for(s);
      const Environment& env = s.learner->environment();
      const Path& a = s.learner->belief()[sel.pair->a].opt_path;
      const Path& b = s.learner->belief()[sel.pair->b].opt_path;
      out["nonce"] = s.pending_nonce;
      out["pair"] = {sel.pair->a, sel.pair->b};
      out["score"] = sel.pair->score;
      out["paths"] = {env.path_json(a), env.path_json(b)};
      out["scene"] = env.scene_json();
    }
  }
  out["status"] = to_string(s.status);
  return envelope(std::move(out));
}

nlohmann::json SessionStore::submit_answer(const std::string& id, const nlohmann::json& body) {
  if (!body.is_object() || !body.contains("nonce") || !body.at("nonce").is_string()) {
    throw ServiceError(400, "body must contain a string 'nonce'");
  }
  if (!body.contains("choice") || !body.at("choice").is_string()) {
    throw ServiceError(400, "body must contain a string 'choice'");
  }
  const std::string choice_name = body.at("choice").get<std::string>();
  const Choice choice = parse_choice(choice_name);
  auto slot = find(id);
  std::lock_guard lock(slot->mutex);
  Session& s = slot->session;
  if (s.status != SessionStatus::Active) throw ServiceError(409, "session is " + std::string(to_string(s.status)));
  if (s.pending_nonce.empty() || body.at("nonce").get<std::string>() != s.pending_nonce) {
    throw ServiceError(409, "nonce does not match the pending query");
  }
  s.learner->answer(choice);
  s.answers.push_back(choice_name);
  s.pending_nonce.clear();
  refresh_status(s);
  persist(s);
  const BeliefState& belief = s.learner->belief();
  return envelope({{"id", s.id},
                   {"iteration", s.learner->iteration()},
                   {"status", to_string(s.status)},
                   {"posterior_entropy", posterior_entropy(belief)},
                   {"top_mass", top_mass(belief)}});
}

nlohmann::json SessionStore::estimate(const std::string& id) {
  auto slot = find(id);
  std::lock_guard lock(slot->mutex);
  const Session& s = slot->session;
  const Environment& env = s.learner->environment();
  const WeightVector w = s.learner->estimate_weight();
  const Path path = env.optimal_path(w);
  nlohmann::json out = {{"id", s.id},
                        {"iteration", s.learner->iteration()},
                        {"status", to_string(s.status)},
                        {"weight", w.values()},
                        {"path", env.path_json(path)}};
  if (s.demo_user) {
    out["weight_error"] = err_weight(w, *s.demo_user);
    out["path_error"] = err_path(path, *s.demo_user, env);
  }
  return envelope(std::move(out));
}

nlohmann::json SessionStore::status(const std::string& id) {
  auto slot = find(id);
  std::lock_guard lock(slot->mutex);
  const Session& s = slot->session;
  const BeliefState& belief = s.learner->belief();
  return envelope({{"id", s.id},
                   {"status", to_string(s.status)},
                   {"iteration", s.learner->iteration()},
                   {"iterations", s.learner->config().iterations},
                   {"selector", prefregret::to_string(s.learner->config().selector)},
                   {"hypotheses", belief.size()},
                   {"posterior_entropy", posterior_entropy(belief)},
                   {"top_mass", top_mass(belief)},
                   {"pending", !s.pending_nonce.empty()}});
}

std::size_t SessionStore::load_snapshots() {
  if (data_dir_.empty()) return 0;
  std::size_t loaded = 0;
  for (const auto& entry : fs::directory_iterator(data_dir_)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    const nlohmann::json snap = nlohmann::json::parse(in);
    auto slot = std::make_shared<Slot>();
    Session& s = slot->session;
    s.id = snap.at("id").get<std::string>();
    s.request = snap.at("request");
    s.answers = snap.at("answers").get<std::vector<std::string>>();
    rebuild(s);
    if (snap.value("status", std::string("active")) == "converged") s.status = SessionStatus::Converged;
    std::unique_lock lock(registry_mutex_);
    sessions_[s.id] = slot;
    ++loaded;
  }
  return loaded;
}

namespace {

void reply(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message, const std::string& field = {}) {
  nlohmann::json body = {{"error", message}};
  if (!field.empty()) body["field"] = field;
  reply(res, status, envelope(std::move(body)));
}

template <class F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      reply(res, 200, f(req));
    } catch (const ServiceError& e) {
      reply_error(res, e.status(), e.what());
    } catch (const ConfigError& e) {
      reply_error(res, 400, e.what(), e.field());
    } catch (const nlohmann::json::exception& e) {
      reply_error(res, 400, e.what());
    } catch (const ContractViolation& e) {
      reply_error(res, 400, e.what());
    } catch (const std::exception& e) {
      reply_error(res, 500, e.what());
    }
  };
}

nlohmann::json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return nlohmann::json::object();
  return nlohmann::json::parse(req.body);
}

std::string session_id(const httplib::Request& req) {
  const std::string id = req.matches[1];
  if (!valid_id(id)) throw ServiceError(404, "unknown session '" + id + "'");
  return id;
}

}  // namespace

void mount(httplib::Server& server, SessionStore& store) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.Post("/sessions", guarded([&store](const httplib::Request& req) { return store.create(parse_body(req)); }));
  server.Get(R"(/sessions/([^/]+)/query)",
             guarded([&store](const httplib::Request& req) { return store.next_query(session_id(req)); }));
  server.Post(R"(/sessions/([^/]+)/answer)", guarded([&store](const httplib::Request& req) {
                return store.submit_answer(session_id(req), parse_body(req));
              }));
  server.Get(R"(/sessions/([^/]+)/estimate)",
             guarded([&store](const httplib::Request& req) { return store.estimate(session_id(req)); }));
  server.Get(R"(/sessions/([^/]+))",
             guarded([&store](const httplib::Request& req) { return store.status(session_id(req)); }));
}

}  // namespace prefregret::service
