#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

// Minimal synchronous subprocess runner for CLI tests: captures stdout and
// stderr via temp files (no pipe-buffer deadlocks) and reports the exit code.

namespace testsupport {

struct ProcResult {
    int code = -1;
    std::string out;
    std::string err;
};

inline std::string slurp(const std::filesystem::path& file) {
    std::ifstream is(file, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

// Environment overrides apply to the child only.
inline ProcResult run_process(const std::vector<std::string>& args,
                              const std::vector<std::pair<std::string, std::string>>& env = {}) {
    namespace fs = std::filesystem;
    static int counter = 0;
    const fs::path base =
        fs::temp_directory_path() / ("helix_proc_" + std::to_string(::getpid()) + "_" +
                                     std::to_string(counter++));
    const fs::path out_file = base.string() + ".out";
    const fs::path err_file = base.string() + ".err";

    const pid_t pid = ::fork();
    if (pid < 0) {
        return {};
    }
    if (pid == 0) {
        const int out_fd = ::open(out_file.c_str(), O_CREAT | O_WRONLY | O_TRUNC, 0600);
        const int err_fd = ::open(err_file.c_str(), O_CREAT | O_WRONLY | O_TRUNC, 0600);
        if (out_fd < 0 || err_fd < 0) {
            ::_exit(127);
        }
        ::dup2(out_fd, STDOUT_FILENO);
        ::dup2(err_fd, STDERR_FILENO);
        ::close(out_fd);
        ::close(err_fd);
        for (const auto& [name, value] : env) {
            ::setenv(name.c_str(), value.c_str(), 1);
        }
        std::vector<char*> argv;
        argv.reserve(args.size() + 1);
        for (const std::string& arg : args) {
            argv.push_back(const_cast<char*>(arg.c_str()));
        }
        argv.push_back(nullptr);
        ::execv(argv[0], argv.data());
        ::_exit(127);
    }

    int status = 0;
    ::waitpid(pid, &status, 0);
    ProcResult result;
    if (WIFEXITED(status)) {
        result.code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.code = 128 + WTERMSIG(status);
    }
    result.out = slurp(out_file);
    result.err = slurp(err_file);
    std::filesystem::remove(out_file);
    std::filesystem::remove(err_file);
    return result;
}

}  // namespace testsupport
