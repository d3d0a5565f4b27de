package types

type (
	Point struct {
		X, Y int
	}
	Shape interface {
		Area() float64
		Perimeter() float64
	}
)

type Set[T comparable] struct {
	items map[T]struct{}
}

func Map[T any, U any](xs []T, f func(T) U) []U {
	out := make([]U, 0, len(xs))
	for _, x := range xs {
		out = append(out, f(x))
	}
	return out
}

const Limit = 10
