#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include <json.hpp>

#include "prefregret/errors.hpp"
#include "prefregret/learner.hpp"

namespace httplib {
class Server;
}

namespace prefregret::service {

inline constexpr int kSchemaVersion = 1;

/// Error carrying the HTTP status it maps to.
class ServiceError : public Error {
 public:
  ServiceError(int status, const std::string& what) : Error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

enum class SessionStatus { Active, Converged, Finished };
const char* to_string(SessionStatus status);

/// Live learning session. The request JSON is kept so the session can be
/// rebuilt from its snapshot by replaying the accepted answers.
struct Session {
  std::string id;
  nlohmann::json request;
  std::unique_ptr<Learner> learner;
  std::optional<WeightVector> demo_user;
  std::string pending_nonce;
  std::vector<std::string> answers;  // "first" / "second", in order
  SessionStatus status = SessionStatus::Active;
};

/// Thread-safe session registry with a write-through JSON snapshot per
/// session. Requests for one session are serialized by its own mutex.
class SessionStore {
 public:
  /// Empty `data_dir` keeps sessions in memory only.
  explicit SessionStore(std::filesystem::path data_dir = {});

  /// Body: {environment, learn: {selector, p, iterations, omega_size, seed},
  ///        demo_user?: [weights]}. Returns {schema_version, id}.
  nlohmann::json create(const nlohmann::json& request);
  nlohmann::json next_query(const std::string& id);
  nlohmann::json submit_answer(const std::string& id, const nlohmann::json& body);
  nlohmann::json estimate(const std::string& id);
  nlohmann::json status(const std::string& id);

  /// Restores every snapshot found in the data directory; returns the count.
  std::size_t load_snapshots();
  std::size_t size() const;

 private:
  struct Slot {
    std::mutex mutex;
    Session session;
  };

  std::shared_ptr<Slot> find(const std::string& id) const;
  void persist(const Session& session) const;
  static void rebuild(Session& session);

  std::filesystem::path data_dir_;
  mutable std::shared_mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
};

/// Registers the HTTP+JSON routes on `server`.
void mount(httplib::Server& server, SessionStore& store);

}  // namespace prefregret::service
