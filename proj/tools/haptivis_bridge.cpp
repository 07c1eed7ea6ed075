// haptivis_bridge: WebSocket front end for BridgeSession. One pipeline per
// connection; messages of a connection are handled strictly in order.

#include <chrono>
#include <cstdio>
#include <deque>
#include <iostream>
#include <memory>
#include <string>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <CLI11.hpp>

#include "haptivis/bridge_service.hpp"

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

constexpr auto kPingInterval = std::chrono::seconds(5);

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, haptivis::RecognizerConfig cfg, bool verbose)
      : ws_(std::move(socket)), ping_(ws_.get_executor()), session_(cfg), verbose_(verbose) {}

  void start() {
    ws_.set_option(websocket::stream_base::decorator([](websocket::response_type& res) {
      res.set(beast::http::field::server, "haptivis-bridge");
    }));
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return self->fail("accept", ec);
      self->schedule_ping();
      self->read();
    });
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec == websocket::error::closed) return self->stop();
      if (ec) return self->fail("read", ec);
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      for (auto& reply : self->session_.handle_text(text)) self->send(std::move(reply));
      self->read();
    });
  }

  void send(std::string msg) {
    outbox_.push_back(std::move(msg));
    if (outbox_.size() == 1) write_next();
  }

  void write_next() {
    ws_.text(true);
    ws_.async_write(asio::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->fail("write", ec);
      self->outbox_.pop_front();
      if (!self->outbox_.empty()) self->write_next();
    });
  }

  void schedule_ping() {
    ping_.expires_after(kPingInterval);
    ping_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec || self->stopped_) return;
      self->ws_.async_ping({}, [self](beast::error_code ec2) {
        if (ec2) return self->fail("ping", ec2);
        self->schedule_ping();
      });
    });
  }

  void fail(const char* what, beast::error_code ec) {
    if (verbose_ && ec != asio::error::operation_aborted) std::fprintf(stderr, "%s: %s\n", what, ec.message().c_str());
    stop();
  }

  void stop() {
    stopped_ = true;
    ping_.cancel();
  }

  websocket::stream<beast::tcp_stream> ws_;
  asio::steady_timer ping_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  haptivis::BridgeSession session_;
  bool verbose_;
  bool stopped_ = false;
};

void accept_loop(tcp::acceptor& acceptor, const haptivis::RecognizerConfig& cfg, bool verbose) {
  acceptor.async_accept([&acceptor, &cfg, verbose](beast::error_code ec, tcp::socket socket) {
    if (!ec) std::make_shared<Connection>(std::move(socket), cfg, verbose)->start();
    accept_loop(acceptor, cfg, verbose);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"haptivis bridge: live pipeline sessions over WebSocket"};
  unsigned short port = 7341;
  std::string address = "0.0.0.0";
  std::string config;
  bool verbose = false;
  app.add_option("--port", port, "TCP port")->capture_default_str();
  app.add_option("--address", address, "listen address")->capture_default_str();
  app.add_option("--config", config, "recognizer config (key = value)");
  app.add_flag("-v,--verbose", verbose, "log connection errors");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const haptivis::RecognizerConfig cfg =
        config.empty() ? haptivis::RecognizerConfig{} : haptivis::parse_config(haptivis::read_text_file(config));
    asio::io_context io;
    tcp::acceptor acceptor(io, {asio::ip::make_address(address), port});
    std::fprintf(stderr, "listening on ws://%s:%u\n", address.c_str(), static_cast<unsigned>(acceptor.local_endpoint().port()));
    accept_loop(acceptor, cfg, verbose);
    asio::signal_set signals(io, SIGINT, SIGTERM);
    signals.async_wait([&io](beast::error_code, int) { io.stop(); });
    io.run();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
