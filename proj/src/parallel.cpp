#include "shared_lasso/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <string_view>

namespace shared_lasso {

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SHARED_LASSO_THREADS")) {
    std::string_view text(env);
    std::size_t value = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec == std::errc{} && res.ptr == text.data() + text.size() && value > 0) return value;
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

}  // namespace shared_lasso
