#include "semlens/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <cstring>

namespace semlens {

namespace {

void set_nonblocking(int fd) {
  int flags = fcntl(fd, F_GETFL, 0);
  fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::string& stdin_data, int timeout_ms) {
  ProcessResult result;
  if (argv.empty()) {
    result.spawn_failed = true;
    return result;
  }

  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (pipe(in_pipe) || pipe(out_pipe) || pipe(err_pipe)) {
    result.spawn_failed = true;
    return result;
  }

  pid_t pid = fork();
  if (pid < 0) {
    result.spawn_failed = true;
    return result;
  }
  if (pid == 0) {
    // Child: own process group so a timeout can kill helpers too.
    setpgid(0, 0);
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    close(err_pipe[1]);
    std::vector<char*> cargv;
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    execvp(cargv[0], cargv.data());
    _exit(127);
  }

  close(in_pipe[0]);
  close(out_pipe[1]);
  close(err_pipe[1]);
  set_nonblocking(out_pipe[0]);
  set_nonblocking(err_pipe[0]);

  // Write stdin (bounded; our inputs are small scripts).
  std::size_t written = 0;
  while (written < stdin_data.size()) {
    ssize_t n = write(in_pipe[1], stdin_data.data() + written,
                      stdin_data.size() - written);
    if (n <= 0) break;
    written += static_cast<std::size_t>(n);
  }
  close(in_pipe[1]);

  auto deadline =
      std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  char buf[4096];
  bool out_open = true, err_open = true;
  int status = 0;
  bool exited = false;

  while (true) {
    struct pollfd fds[2];
    nfds_t nfds = 0;
    if (out_open) fds[nfds++] = {out_pipe[0], POLLIN, 0};
    if (err_open) fds[nfds++] = {err_pipe[0], POLLIN, 0};

    auto now = std::chrono::steady_clock::now();
    int wait_ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());
    if (wait_ms < 0) wait_ms = 0;

    if (nfds > 0) {
      int rc = poll(fds, nfds, std::min(wait_ms, 50));
      if (rc > 0) {
        for (nfds_t i = 0; i < nfds; ++i) {
          if (!(fds[i].revents & (POLLIN | POLLHUP))) continue;
          ssize_t n;
          while ((n = read(fds[i].fd, buf, sizeof(buf))) > 0) {
            if (fds[i].fd == out_pipe[0]) result.out.append(buf, static_cast<std::size_t>(n));
            else result.err.append(buf, static_cast<std::size_t>(n));
          }
          if (n == 0) {
            if (fds[i].fd == out_pipe[0]) out_open = false;
            else err_open = false;
          }
        }
      }
    }

    if (!exited) {
      pid_t w = waitpid(pid, &status, WNOHANG);
      if (w == pid) exited = true;
    }
    if (exited && !out_open && !err_open) break;
    if (exited && nfds == 0) break;

    if (std::chrono::steady_clock::now() >= deadline) {
      if (!exited) {
        kill(-pid, SIGKILL);
        kill(pid, SIGKILL);
        waitpid(pid, &status, 0);
        result.timed_out = true;
      }
      // Drain whatever is left.
      ssize_t n;
      while (out_open && (n = read(out_pipe[0], buf, sizeof(buf))) > 0)
        result.out.append(buf, static_cast<std::size_t>(n));
      while (err_open && (n = read(err_pipe[0], buf, sizeof(buf))) > 0)
        result.err.append(buf, static_cast<std::size_t>(n));
      break;
    }
  }

  close(out_pipe[0]);
  close(err_pipe[0]);
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status)) result.exit_code = 128 + WTERMSIG(status);
  if (result.exit_code == 127 && result.out.empty() && result.err.empty())
    result.spawn_failed = true;
  return result;
}

}  // namespace semlens
