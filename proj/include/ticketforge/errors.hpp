#pragma once

#include <stdexcept>
#include <string>

namespace ticketforge {

// Process exit codes used by the CLI. Library code throws; tools translate.
enum class ExitCode : int {
  ok = 0,
  config_error = 2,
  data_error = 3,
  train_abort = 4,
};

// Dimension/topology mismatch; message names the offending layer.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration; message carries the key path.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dataset or result-file problems.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Training diverged (non-finite loss).
struct TrainAbortError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class TicketIoKind {
  bad_magic,
  bad_version,
  truncated,
  bad_checksum,
  io,
};

class TicketIoError : public DataError {
 public:
  TicketIoError(TicketIoKind kind, const std::string& msg)
      : DataError(msg), kind_(kind) {}
  TicketIoKind kind() const { return kind_; }

 private:
  TicketIoKind kind_;
};

}  // namespace ticketforge
