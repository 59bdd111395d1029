#include <iostream>

#include "CLI11.hpp"
#include "mock_embed_server.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Mock embeddings server (POST /v1/embeddings)"};
  monoembed::mock::MockOptions opts;
  std::string host = "127.0.0.1";
  int port = 8089;
  std::string mode = "ok";
  app.add_option("--host", host);
  app.add_option("--port", port, "0 picks a free port");
  app.add_option("--dims", opts.dims)->check(CLI::Range(2, 1 << 16));
  app.add_option("--max-delay-ms", opts.max_delay_ms)->check(CLI::NonNegativeNumber);
  app.add_option("--seed", opts.seed);
  app.add_option("--mode", mode)->check(CLI::IsMember({"ok", "mismatch", "fail"}));
  CLI11_PARSE(app, argc, argv);
  opts.mode = mode == "fail" ? monoembed::mock::Mode::fail
              : mode == "mismatch" ? monoembed::mock::Mode::mismatch
                                   : monoembed::mock::Mode::ok;

  monoembed::mock::MockEmbedServer server(opts);
  if (port == 0) {
    const int bound = server.start(host, 0);
    std::cout << "listening on " << host << ':' << bound << std::endl;
    std::cin.get();  // runs until stdin closes
    return 0;
  }
  std::cout << "listening on " << host << ':' << port << std::endl;
  return server.listen(host, port) ? 0 : 1;
}
