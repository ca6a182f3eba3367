#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <thread>

#include <unistd.h>

#include "httplib.h"
#include "prefregret/environment_factory.hpp"
#include "prefregret/experiments.hpp"
#include "prefregret/learner.hpp"
#include "prefregret/service.hpp"

using namespace prefregret;
using nlohmann::json;

namespace {

const json kEnv = {{"kind", "gridworld"}, {"map", "builtin:mobile"}};

json session_request(std::uint64_t seed, std::size_t iterations = 6) {
  return {{"environment", kEnv},
          {"learn", {{"selector", "regret"}, {"iterations", iterations}, {"omega_size", 30}, {"seed", seed}}}};
}

/// In-process server on an ephemeral port.
class TestServer {
 public:
  explicit TestServer(std::filesystem::path dir = {}) : store_(std::move(dir)) {
    service::mount(server_, store_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~TestServer() {
    server_.stop();
    thread_.join();
  }

  httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }
  service::SessionStore& store() { return store_; }

 private:
  service::SessionStore store_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

json body_of(const httplib::Result& r) {
  REQUIRE(r);
  return json::parse(r->body);
}

std::string create(httplib::Client& c, const json& request) {
  const auto r = c.Post("/sessions", request.dump(), "application/json");
  REQUIRE(r);
  REQUIRE(r->status == 200);
  return body_of(r).at("id").get<std::string>();
}

httplib::Result post_answer(httplib::Client& c, const std::string& id, const std::string& nonce,
                            const std::string& choice) {
  return c.Post("/sessions/" + id + "/answer", json{{"nonce", nonce}, {"choice", choice}}.dump(),
                "application/json");
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("prefregret_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("error codes") {
  TestServer server;
  auto c = server.client();
  CHECK(c.Get("/sessions/nosuchsession/query")->status == 404);
  CHECK(c.Get("/sessions/nosuchsession")->status == 404);

  auto bad = c.Post("/sessions", json{{"learn", {{"p", 0.3}}}}.dump(), "application/json");
  CHECK(bad->status == 400);
  bad = c.Post("/sessions", json{{"environment", kEnv}, {"learn", {{"p", 0.3}}}}.dump(), "application/json");
  CHECK(bad->status == 400);
  CHECK(body_of(bad).at("field") == "learn.p");
  CHECK(c.Post("/sessions", "{not json", "application/json")->status == 400);

  const std::string id = create(c, session_request(1, 1));
  const json q = body_of(c.Get("/sessions/" + id + "/query"));
  REQUIRE(q.contains("nonce"));
  CHECK(post_answer(c, id, q.at("nonce"), "both")->status == 400);
  CHECK(post_answer(c, id, "deadbeef", "first")->status == 409);
  CHECK(c.Post("/sessions/" + id + "/answer", "{}", "application/json")->status == 400);
  CHECK(post_answer(c, id, q.at("nonce"), "first")->status == 200);
  // one iteration configured: the session is finished now
  CHECK(body_of(c.Get("/sessions/" + id)).at("status") == "finished");
  CHECK(post_answer(c, id, q.at("nonce"), "first")->status == 409);
}

TEST_CASE("query is stable until answered") {
  TestServer server;
  auto c = server.client();
  const std::string id = create(c, session_request(2));
  const json a = body_of(c.Get("/sessions/" + id + "/query"));
  const json b = body_of(c.Get("/sessions/" + id + "/query"));
  CHECK(a.at("nonce") == b.at("nonce"));
  CHECK(a.at("pair") == b.at("pair"));
  CHECK(a.at("schema_version") == service::kSchemaVersion);
  CHECK(a.at("paths").size() == 2);
  CHECK(a.at("scene").at("kind") == "gridworld");
  REQUIRE(post_answer(c, id, a.at("nonce"), "second")->status == 200);
  const json next = body_of(c.Get("/sessions/" + id + "/query"));
  CHECK(next.at("nonce") != a.at("nonce"));
  CHECK(next.at("iteration") == 1);
}

TEST_CASE("duplicate concurrent answers are accepted exactly once") {
  TestServer server;
  auto c = server.client();
  const std::string id = create(c, session_request(3));
  const std::string nonce = body_of(c.Get("/sessions/" + id + "/query")).at("nonce");
  std::atomic<int> ok{0}, conflict{0}, other{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 100; ++i) {
    threads.emplace_back([&] {
      auto client = server.client();
      const auto r = post_answer(client, id, nonce, "first");
      if (!r) {
        ++other;
      } else if (r->status == 200) {
        ++ok;
      } else if (r->status == 409) {
        ++conflict;
      } else {
        ++other;
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(ok == 1);
  CHECK(conflict == 99);
  CHECK(other == 0);
  CHECK(body_of(c.Get("/sessions/" + id)).at("iteration") == 1);
}

TEST_CASE("sessions are isolated") {
  TestServer server;
  auto c = server.client();
  const std::string a = create(c, session_request(4));
  const std::string b = create(c, session_request(5));
  CHECK(a != b);
  const json qa = body_of(c.Get("/sessions/" + a + "/query"));
  const json qb = body_of(c.Get("/sessions/" + b + "/query"));
  CHECK(qa.at("nonce") != qb.at("nonce"));
  REQUIRE(post_answer(c, a, qa.at("nonce"), "first")->status == 200);
  REQUIRE(post_answer(c, a, body_of(c.Get("/sessions/" + a + "/query")).at("nonce"), "first")->status == 200);
  CHECK(body_of(c.Get("/sessions/" + a)).at("iteration") == 2);
  CHECK(body_of(c.Get("/sessions/" + b)).at("iteration") == 0);
  // b's pending query survives a's progress
  CHECK(post_answer(c, b, qb.at("nonce"), "second")->status == 200);
  // a nonce is only valid for its own session
  const json qa3 = body_of(c.Get("/sessions/" + a + "/query"));
  CHECK(post_answer(c, b, qa3.at("nonce"), "first")->status == 409);
}

TEST_CASE("demo session reproduces run_learning") {
  constexpr std::uint64_t kSeed = 31;
  constexpr std::size_t kIterations = 6;
  const auto env = make_environment(kEnv);
  const TrialSeeds seeds = trial_seeds(8, 0);
  const SimulatedUser user = make_trial_user(*env, UserSpec{}, seeds);

  LearnerConfig lc;
  lc.selector = SelectorKind::Regret;
  lc.iterations = kIterations;
  lc.omega_size = 30;
  lc.seed = kSeed;
  const TrialResult reference = run_learning(lc, env, user);

  TestServer server;
  auto c = server.client();
  json request = session_request(kSeed, kIterations);
  request["demo_user"] = user.w_user.values();
  const std::string id = create(c, request);

  // the client replays the simulated user against its own copy of Omega
  Learner mirror(env, lc);
  for (std::uint64_t k = 0; k < kIterations; ++k) {
    const json q = body_of(c.Get("/sessions/" + id + "/query"));
    if (q.at("status") != "active") break;
    const std::size_t a = q.at("pair")[0], b = q.at("pair")[1];
    const Choice choice = answer(user, mirror.belief()[a].opt_path, mirror.belief()[b].opt_path, k);
    mirror.pending();
    mirror.answer(choice);
    REQUIRE(post_answer(c, id, q.at("nonce"), choice == Choice::First ? "first" : "second")->status == 200);
  }
  const json est = body_of(c.Get("/sessions/" + id + "/estimate"));
  CHECK(est.at("weight").get<std::vector<double>>() == reference.final_weight.values());
  CHECK(est.at("weight_error").get<double>() == reference.records.back().weight_error);
  CHECK(est.at("path_error").get<double>() == reference.records.back().path_error);
}

TEST_CASE("snapshots restore sessions") {
  const auto dir = fresh_dir("snapshots");
  std::string id;
  json before;
  {
    TestServer server(dir);
    auto c = server.client();
    id = create(c, session_request(6));
    for (const char* choice : {"first", "second", "first"}) {
      const json q = body_of(c.Get("/sessions/" + id + "/query"));
      REQUIRE(post_answer(c, id, q.at("nonce"), choice)->status == 200);
    }
    before = body_of(c.Get("/sessions/" + id + "/estimate"));
  }
  CHECK(std::filesystem::exists(dir / (id + ".json")));
  TestServer restarted(dir);
  CHECK(restarted.store().load_snapshots() == 1);
  auto c = restarted.client();
  const json after = body_of(c.Get("/sessions/" + id + "/estimate"));
  CHECK(after.at("weight") == before.at("weight"));
  CHECK(after.at("iteration") == 3);
  const json q = body_of(c.Get("/sessions/" + id + "/query"));
  CHECK(post_answer(c, id, q.at("nonce"), "first")->status == 200);
  std::filesystem::remove_all(dir);
}

TEST_CASE("cross-origin headers for the browser client") {
  TestServer server;
  auto c = server.client();
  const auto pre = c.Options("/sessions");
  REQUIRE(pre);
  CHECK(pre->status == 204);
  CHECK(pre->get_header_value("Access-Control-Allow-Origin") == "*");
}
