#include <algorithm>
#include <vector>

int sum_even(const std::vector<int>& xs) {
    int total = 0;
    std::for_each(xs.begin(), xs.end(), [&](int x) {
        if (x % 2 == 0) {
            total += x;
        }
    });
    return total;
}

auto make_counter() {
    return [n = 0]() mutable {
        return ++n;
    };
}
