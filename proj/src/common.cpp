#include "measurefit/common.hpp"

#include <iostream>
#include <mutex>

namespace measurefit {

namespace {
std::mutex warn_mutex;
}

void warn(const std::string& msg) {
  std::lock_guard<std::mutex> lock(warn_mutex);
  std::cerr << "warning: " << msg << '\n';
}

}  // namespace measurefit
