#pragma once

#include <cerrno>
#include <cstdint>
#include <cstring>
#include <string>
#include <unordered_map>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "core.hpp"

namespace mcx {

// ============================================================================
// LZ78 with exact bit accounting
// ============================================================================

// One parsed phrase: the index of the longest dictionary match (0 = empty
// phrase) plus one literal byte extending it. The final phrase of an input
// may be an exact dictionary match with no extension; literal is -1 there.
struct lz78_phrase {
    std::uint32_t prefix_index;
    int literal;
};

inline std::vector<lz78_phrase> lz78_parse(const std::vector<std::uint8_t>& data) {
    std::vector<lz78_phrase> phrases;
    // Trie over phrases, nodes keyed by (parent index << 8 | byte).
    std::unordered_map<std::uint64_t, std::uint32_t> child;
    std::uint32_t node = 0;
    std::uint32_t next_index = 1;
    for (std::uint8_t byte : data) {
        std::uint64_t key = (static_cast<std::uint64_t>(node) << 8) | byte;
        auto it = child.find(key);
        if (it != child.end()) {
            node = it->second;
            continue;
        }
        phrases.push_back({node, byte});
        child.emplace(key, next_index++);
        node = 0;
    }
    if (node != 0)
        phrases.push_back({node, -1});
    return phrases;
}

namespace detail {

inline std::uint32_t ceil_log2(std::uint64_t v) {
    std::uint32_t bits = 0;
    std::uint64_t p = 1;
    while (p < v) {
        p <<= 1;
        ++bits;
    }
    return bits;
}

} // namespace detail

// Cost model: phrase i (1-based) spends ceil(log2 i) bits on its dictionary
// index and 8 bits on the literal; a trailing exact-match phrase spends only
// the index bits it would need as phrase next_index.
inline std::uint64_t lz78_length(const std::vector<std::uint8_t>& data) {
    std::vector<lz78_phrase> phrases = lz78_parse(data);
    std::uint64_t bits = 0;
    std::uint64_t index = 1;
    for (const lz78_phrase& p : phrases) {
        bits += detail::ceil_log2(index);
        if (p.literal >= 0) {
            bits += 8;
            ++index;
        }
    }
    return bits;
}

// Test support: expand a phrase list back to bytes. Exists so the cost model
// can be audited against an actual decode, not used by the estimators.
inline std::vector<std::uint8_t>
lz78_decode(const std::vector<lz78_phrase>& phrases) {
    std::vector<std::pair<std::uint32_t, std::uint8_t>> dict; // (prefix, byte)
    std::vector<std::uint8_t> out;
    auto expand = [&](std::uint32_t idx, auto&& self) -> void {
        if (idx == 0)
            return;
        const auto& [prefix, byte] = dict[idx - 1];
        self(prefix, self);
        out.push_back(byte);
    };
    for (const lz78_phrase& p : phrases) {
        expand(p.prefix_index, expand);
        if (p.literal >= 0) {
            out.push_back(static_cast<std::uint8_t>(p.literal));
            dict.emplace_back(p.prefix_index, static_cast<std::uint8_t>(p.literal));
        }
    }
    return out;
}

// ============================================================================
// external compressor adapter
// ============================================================================

struct external_tool {
    std::vector<std::string> argv;
    std::uint64_t max_output_bytes = 1ull << 30;
};

namespace detail {

// Splits a command line on whitespace; single or double quotes group words.
inline std::vector<std::string> split_command(std::string_view line) {
    std::vector<std::string> words;
    std::string cur;
    bool in_word = false;
    char quote = 0;
    for (char c : line) {
        if (quote) {
            if (c == quote)
                quote = 0;
            else
                cur.push_back(c);
            continue;
        }
        if (c == '\'' || c == '"') {
            quote = c;
            in_word = true;
            continue;
        }
        if (c == ' ' || c == '\t') {
            if (in_word) {
                words.push_back(cur);
                cur.clear();
                in_word = false;
            }
            continue;
        }
        cur.push_back(c);
        in_word = true;
    }
    if (in_word)
        words.push_back(cur);
    return words;
}

struct pipe_fds {
    int read_end = -1;
    int write_end = -1;
};

inline pipe_fds make_pipe() {
    int fds[2];
    if (pipe(fds) != 0)
        fail_tool(std::string("pipe: ") + std::strerror(errno));
    return {fds[0], fds[1]};
}

} // namespace detail

// Runs the tool as a filter: data on its standard input, compressed bytes
// counted from its standard output. Returns 8 * output byte count.
inline std::uint64_t external_length(const std::vector<std::uint8_t>& data,
                                     const external_tool& tool) {
    if (tool.argv.empty())
        fail_usage("external compressor command is empty");

    detail::pipe_fds to_child = detail::make_pipe();
    detail::pipe_fds from_child = detail::make_pipe();
    detail::pipe_fds err_child = detail::make_pipe();

    pid_t pid = fork();
    if (pid < 0)
        fail_tool(std::string("fork: ") + std::strerror(errno));
    if (pid == 0) {
        dup2(to_child.read_end, STDIN_FILENO);
        dup2(from_child.write_end, STDOUT_FILENO);
        dup2(err_child.write_end, STDERR_FILENO);
        close(to_child.read_end);
        close(to_child.write_end);
        close(from_child.read_end);
        close(from_child.write_end);
        close(err_child.read_end);
        close(err_child.write_end);
        std::vector<char*> argv;
        for (const std::string& a : tool.argv)
            argv.push_back(const_cast<char*>(a.c_str()));
        argv.push_back(nullptr);
        execvp(argv[0], argv.data());
        const char* msg = "exec failed\n";
        ssize_t ignored = write(STDERR_FILENO, msg, std::strlen(msg));
        (void)ignored;
        _exit(127);
    }

    close(to_child.read_end);
    close(from_child.write_end);
    close(err_child.write_end);
    fcntl(to_child.write_end, F_SETFL, O_NONBLOCK);

    std::uint64_t out_bytes = 0;
    std::string diagnostics;
    std::size_t written = 0;
    bool stdin_open = true;
    bool stdout_open = true;
    bool stderr_open = true;
    signal(SIGPIPE, SIG_IGN);

    char buf[65536];
    while (stdout_open || stderr_open || stdin_open) {
        struct pollfd fds[3];
        nfds_t n = 0;
        int out_slot = -1, err_slot = -1, in_slot = -1;
        if (stdout_open) {
            out_slot = static_cast<int>(n);
            fds[n++] = {from_child.read_end, POLLIN, 0};
        }
        if (stderr_open) {
            err_slot = static_cast<int>(n);
            fds[n++] = {err_child.read_end, POLLIN, 0};
        }
        if (stdin_open) {
            in_slot = static_cast<int>(n);
            fds[n++] = {to_child.write_end, POLLOUT, 0};
        }
        if (poll(fds, n, -1) < 0) {
            if (errno == EINTR)
                continue;
            fail_tool(std::string("poll: ") + std::strerror(errno));
        }
        if (out_slot >= 0 && (fds[out_slot].revents & (POLLIN | POLLHUP))) {
            ssize_t r = read(from_child.read_end, buf, sizeof buf);
            if (r > 0) {
                out_bytes += static_cast<std::uint64_t>(r);
                if (out_bytes > tool.max_output_bytes) {
                    kill(pid, SIGKILL);
                    waitpid(pid, nullptr, 0);
                    fail_tool("external compressor output exceeds cap");
                }
            } else if (r == 0) {
                close(from_child.read_end);
                stdout_open = false;
            }
        }
        if (err_slot >= 0 && (fds[err_slot].revents & (POLLIN | POLLHUP))) {
            ssize_t r = read(err_child.read_end, buf, sizeof buf);
            if (r > 0) {
                if (diagnostics.size() < 4096)
                    diagnostics.append(buf, static_cast<std::size_t>(r));
            } else if (r == 0) {
                close(err_child.read_end);
                stderr_open = false;
            }
        }
        if (in_slot >= 0 && (fds[in_slot].revents & (POLLOUT | POLLERR | POLLHUP))) {
            if (fds[in_slot].revents & (POLLERR | POLLHUP)) {
                close(to_child.write_end);
                stdin_open = false;
            } else {
                std::size_t chunk = std::min<std::size_t>(sizeof buf,
                                                          data.size() - written);
                ssize_t w = chunk == 0
                                ? 0
                                : write(to_child.write_end, data.data() + written,
                                        chunk);
                if (w > 0)
                    written += static_cast<std::size_t>(w);
                if (written == data.size() || (w < 0 && errno == EPIPE)) {
                    close(to_child.write_end);
                    stdin_open = false;
                } else if (w < 0 && errno != EAGAIN) {
                    close(to_child.write_end);
                    stdin_open = false;
                }
            }
        }
    }

    int status = 0;
    waitpid(pid, &status, 0);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        std::string what = "external compressor '" + tool.argv[0] + "' failed";
        if (WIFEXITED(status))
            what += " (exit " + std::to_string(WEXITSTATUS(status)) + ")";
        if (!diagnostics.empty())
            what += ": " + diagnostics;
        fail_tool(what);
    }
    if (written < data.size())
        fail_tool("external compressor closed its input early");
    return 8 * out_bytes;
}

// ============================================================================
// compressor registry
// ============================================================================

inline compressor make_lz78_compressor() {
    return {"lz78",
            [](const std::vector<std::uint8_t>& data) { return lz78_length(data); }};
}

inline compressor make_external_compressor(std::string command_line) {
    external_tool tool;
    tool.argv = detail::split_command(command_line);
    if (tool.argv.empty())
        fail_usage("external compressor command is empty");
    return {"ext:" + command_line,
            [tool](const std::vector<std::uint8_t>& data) {
                return external_length(data, tool);
            }};
}

// CLI syntax: "lz78" or "ext:<command line>".
inline compressor parse_compressor(std::string_view text) {
    if (text == "lz78")
        return make_lz78_compressor();
    if (text.size() > 4 && text.substr(0, 4) == "ext:")
        return make_external_compressor(std::string(text.substr(4)));
    fail_usage("unknown compressor '" + std::string(text) + "'");
}

} // namespace mcx
