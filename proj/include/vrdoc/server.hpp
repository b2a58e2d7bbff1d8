#ifndef VRDOC_SERVER_HPP_
#define VRDOC_SERVER_HPP_

// Newline-delimited JSON over TCP (POSIX sockets). One thread per
// connection; all connections share one SessionManager.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <list>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "vrdoc/session.hpp"

namespace vrdoc {

class TcpServer {
 public:
  explicit TcpServer(SessionManager& sessions) : sessions_(sessions) {}
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;
  ~TcpServer() { stop(); }

  /// Binds 127.0.0.1:port (0 picks a free port) and returns the bound port.
  int listen(int port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(static_cast<uint16_t>(port));
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(fd_, 16) < 0) {
      const std::string err = std::strerror(errno);
      ::close(fd_);
      fd_ = -1;
      throw std::runtime_error("cannot listen on port " + std::to_string(port) + ": " + err);
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    return ntohs(addr.sin_port);
  }

  /// Accepts connections until stop() is called.
  void serve() {
    while (!stopping_) {
      const int client = ::accept(fd_, nullptr, nullptr);
      if (client < 0) {
        if (stopping_) break;
        if (errno == EINTR) continue;
        break;
      }
      std::lock_guard lock(mutex_);
      clients_.push_back(client);
      workers_.emplace_back([this, client] { connection(client); });
    }
  }

  void start() {
    acceptor_ = std::thread([this] { serve(); });
  }

  void stop() {
    if (stopping_.exchange(true)) return;
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
    }
    if (acceptor_.joinable()) acceptor_.join();
    std::lock_guard lock(mutex_);
    for (int c : clients_) ::shutdown(c, SHUT_RDWR);
    for (auto& w : workers_) {
      if (w.joinable()) w.join();
    }
  }

 private:
  static bool send_all(int fd, const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
      const auto n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
      if (n <= 0) return false;
      off += static_cast<std::size_t>(n);
    }
    return true;
  }

  void connection(int fd) {
    std::string buffer;
    char chunk[4096];
    for (;;) {
      const auto n = ::recv(fd, chunk, sizeof chunk, 0);
      if (n <= 0) break;
      buffer.append(chunk, static_cast<std::size_t>(n));
      std::size_t nl;
      while ((nl = buffer.find('\n')) != std::string::npos) {
        std::string line = buffer.substr(0, nl);
        buffer.erase(0, nl + 1);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::string reply;
        for (const auto& m : sessions_.handle(line)) reply += m.dump() + "\n";
        if (!send_all(fd, reply)) {
          release(fd);
          return;
        }
      }
    }
    release(fd);
  }

  void release(int fd) {
    std::lock_guard lock(mutex_);
    clients_.remove(fd);
    ::close(fd);
  }

  SessionManager& sessions_;
  int fd_ = -1;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex mutex_;
  std::list<int> clients_;
  std::list<std::thread> workers_;
};

}  // namespace vrdoc

#endif  // VRDOC_SERVER_HPP_
