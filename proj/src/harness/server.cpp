#include "stealth/harness/server.hpp"

#include <boost/asio.hpp>
#include <boost/beast.hpp>
#include <chrono>
#include <deque>
#include <fstream>
#include <sstream>

#include "stealth/harness/session.hpp"

namespace stealth::harness {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

constexpr std::size_t kMaxQueuedReplies = 64;  // meta/error replies; beyond this they are dropped

std::string_view mime_type(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".wasm") return "application/wasm";
  return "application/octet-stream";
}

http::response<http::string_body> static_response(const http::request<http::string_body>& req,
                                                  const std::optional<std::filesystem::path>& root) {
  const auto reply = [&](http::status status, std::string_view type, std::string body) {
    http::response<http::string_body> res{status, req.version()};
    res.set(http::field::content_type, std::string(type));
    res.body() = std::move(body);
    res.keep_alive(false);
    res.prepare_payload();
    return res;
  };
  if (req.method() != http::verb::get && req.method() != http::verb::head)
    return reply(http::status::method_not_allowed, "text/plain", "GET only\n");
  std::string target(req.target());
  if (const auto q = target.find('?'); q != std::string::npos) target.erase(q);
  if (target.empty() || target[0] != '/' || target.find("..") != std::string::npos)
    return reply(http::status::bad_request, "text/plain", "bad path\n");
  if (!root) return reply(http::status::not_found, "text/plain", "stealthsim: connect with a websocket client\n");
  if (target.back() == '/') target += "index.html";
  const std::filesystem::path file = *root / target.substr(1);
  std::ifstream in(file, std::ios::binary);
  if (!in) return reply(http::status::not_found, "text/plain", "not found\n");
  std::stringstream ss;
  ss << in.rdbuf();
  return reply(http::status::ok, mime_type(file), ss.str());
}

class WsConnection : public std::enable_shared_from_this<WsConnection> {
 public:
  WsConnection(tcp::socket socket, const ServeOptions& opts)
      : ws_(std::move(socket)), timer_(ws_.get_executor()), session_(opts.scenario, opts.seed, opts.overrides) {}

  void start(http::request<http::string_body> req) {
    ws_.text(true);
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->read();
      self->next_tick_ = std::chrono::steady_clock::now();
      self->schedule();
    });
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    timer_.cancel();
    beast::get_lowest_layer(ws_).close();
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      for (const Json& reply : self->session_.handle(text)) self->queue_reply(reply.dump());
      self->read();
    });
  }

  void schedule() {
    if (closed_) return;
    const auto period = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(1.0 / std::max(session_.tick_rate(), 0.1)));
    next_tick_ += period;
    // Fixed rate; if we fell behind, skip the missed slots instead of bursting.
    const auto now = std::chrono::steady_clock::now();
    if (next_tick_ < now) next_tick_ = now;
    timer_.expires_at(next_tick_);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec || self->closed_) return;
      if (auto snap = self->session_.tick()) {
        self->latest_ = snap->dump();  // replaces any snapshot still waiting
        self->write();
      }
      self->schedule();
    });
  }

  void queue_reply(std::string text) {
    if (replies_.size() < kMaxQueuedReplies) replies_.push_back(std::move(text));
    write();
  }

  void write() {
    if (writing_ || closed_) return;
    if (!replies_.empty()) {
      out_ = std::move(replies_.front());
      replies_.pop_front();
    } else if (latest_) {
      out_ = std::move(*latest_);
      latest_.reset();
    } else {
      return;
    }
    writing_ = true;
    ws_.async_write(net::buffer(out_), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->writing_ = false;
      if (ec) return self->close();
      self->write();
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  net::steady_timer timer_;
  beast::flat_buffer buffer_;
  Session session_;
  std::chrono::steady_clock::time_point next_tick_;
  std::deque<std::string> replies_;
  std::optional<std::string> latest_;
  std::string out_;
  bool writing_ = false;
  bool closed_ = false;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket socket, const ServeOptions& opts) : stream_(std::move(socket)), opts_(opts) {}

  void start() {
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (websocket::is_upgrade(self->req_)) {
        self->stream_.expires_never();
        std::make_shared<WsConnection>(self->stream_.release_socket(), self->opts_)->start(std::move(self->req_));
        return;
      }
      self->res_ = static_response(self->req_, self->opts_.static_root);
      http::async_write(self->stream_, self->res_, [self](beast::error_code, std::size_t) {
        beast::error_code ignored;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
      });
    });
  }

 private:
  beast::tcp_stream stream_;
  const ServeOptions& opts_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  http::response<http::string_body> res_;
};

}  // namespace

struct Server::Impl {
  explicit Impl(ServeOptions o) : opts(std::move(o)), acceptor(ioc) {
    const tcp::endpoint ep{net::ip::make_address(opts.address), opts.port};
    acceptor.open(ep.protocol());
    acceptor.set_option(net::socket_base::reuse_address(true));
    acceptor.bind(ep);
    acceptor.listen();
  }

  void accept() {
    acceptor.async_accept(ioc, [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<HttpConnection>(std::move(socket), opts)->start();
      accept();
    });
  }

  ServeOptions opts;
  net::io_context ioc;
  tcp::acceptor acceptor;
};

Server::Server(ServeOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}
Server::~Server() = default;

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() {
  net::signal_set signals(impl_->ioc);
  if (impl_->opts.stop_on_signal) {
    signals.add(SIGINT);
    signals.add(SIGTERM);
    signals.async_wait([this](beast::error_code ec, int) {
      if (!ec) stop();
    });
  }
  impl_->accept();
  impl_->ioc.run();
}

void Server::stop() { impl_->ioc.stop(); }

}  // namespace stealth::harness
