#include "rtheta/process.hpp"

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <thread>

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "rtheta/errors.hpp"
#include "rtheta/profile_record.hpp"

namespace rtheta {

namespace {

class Fd {
 public:
  explicit Fd(int fd = -1) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() { reset(); }
  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_;
};

[[noreturn]] void child_fail(int report_fd) {
  const int err = errno;
  [[maybe_unused]] auto n = ::write(report_fd, &err, sizeof err);
  ::_exit(127);
}

}  // namespace

std::optional<std::filesystem::path> find_executable(const std::string& name) {
  if (name.find('/') != std::string::npos) {
    if (::access(name.c_str(), X_OK) == 0) return std::filesystem::path(name);
    return std::nullopt;
  }
  const char* path_env = std::getenv("PATH");
  std::stringstream dirs(path_env ? path_env : "/usr/bin:/bin");
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    if (dir.empty()) continue;
    const auto candidate = std::filesystem::path(dir) / name;
    if (::access(candidate.c_str(), X_OK) == 0 && std::filesystem::is_regular_file(candidate))
      return candidate;
  }
  return std::nullopt;
}

ChildResult run_child(const std::vector<std::string>& argv, const ChildOptions& options) {
  if (argv.empty()) throw SpawnError("empty command line");

  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  const std::string stdin_name = options.stdin_path ? options.stdin_path->string() : "/dev/null";
  Fd in(::open(stdin_name.c_str(), O_RDONLY | O_CLOEXEC));
  if (in.get() < 0) throw SpawnError("cannot open input " + stdin_name + ": " + std::strerror(errno));
  Fd devnull(::open("/dev/null", O_WRONLY | O_CLOEXEC));

  int report[2];
  if (::pipe2(report, O_CLOEXEC) != 0) throw SpawnError(std::string("pipe: ") + std::strerror(errno));
  Fd report_read(report[0]);
  Fd report_write(report[1]);

  ChildResult result;
  result.started = std::chrono::steady_clock::now();
  const pid_t pid = ::fork();
  if (pid < 0) throw SpawnError(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    // Own process group, so a timeout also reaches grandchildren (the
    // profiler forks the workload).
    ::setpgid(0, 0);
    if (::dup2(in.get(), STDIN_FILENO) < 0) child_fail(report_write.get());
    if (::dup2(devnull.get(), STDOUT_FILENO) < 0) child_fail(report_write.get());
    if (::dup2(devnull.get(), STDERR_FILENO) < 0) child_fail(report_write.get());
    ::execvp(args[0], args.data());
    child_fail(report_write.get());
  }
  report_write.reset();

  int child_errno = 0;
  const auto got = ::read(report_read.get(), &child_errno, sizeof child_errno);

  const auto deadline = result.started + options.timeout;
  auto backoff = std::chrono::microseconds(50);
  int status = 0;
  for (;;) {
    const pid_t done = ::wait4(pid, &status, WNOHANG, &result.usage);
    if (done == pid) break;
    if (done < 0 && errno != EINTR) throw SpawnError(std::string("wait4: ") + std::strerror(errno));
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      while (::wait4(pid, &status, 0, &result.usage) < 0 && errno == EINTR) {
      }
      result.timed_out = true;
      break;
    }
    std::this_thread::sleep_for(backoff);
    backoff = std::min(backoff * 2, std::chrono::microseconds(2000));
  }
  result.finished = std::chrono::steady_clock::now();
  result.wall_seconds = std::chrono::duration<double>(result.finished - result.started).count();

  if (got == static_cast<ssize_t>(sizeof child_errno))
    throw SpawnError("cannot execute " + argv[0] + ": " + std::strerror(child_errno));

  if (result.timed_out)
    result.exit_code = kTimeoutExitCode;
  else if (WIFEXITED(status))
    result.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status))
    result.exit_code = 128 + WTERMSIG(status);
  return result;
}

}  // namespace rtheta
