#include <string>
#include <vector>

namespace ui {

class Widget {
public:
    explicit Widget(std::string name) : name_(std::move(name)) {}

    void add(Widget child)
    {
        children_.push_back(std::move(child));
    }

    std::size_t count() const noexcept {
        std::size_t n = 1;
        for (const auto& c : children_) n += c.count();
        return n;
    }

private:
    std::string name_;
    std::vector<Widget> children_;
};

}  // namespace ui
