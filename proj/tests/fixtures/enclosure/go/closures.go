package closures

import "sort"

func SortBy(xs []int, less func(a, b int) bool) {
	sort.Slice(xs, func(i, j int) bool {
		return less(xs[i], xs[j])
	})
}

func Counter() func() int {
	n := 0
	return func() int {
		n++
		return n
	}
}

var handler = func(x int) int {
	return x * 2
}
