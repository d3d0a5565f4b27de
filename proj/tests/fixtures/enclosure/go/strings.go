package strs

const tmpl = `func fake() {
	{ unbalanced
`

func Render(name string) string {
	s := "}{"
	r := '}'
	_ = r
	return s + name + tmpl
}

// func commented() {
func Quote(x string) string {
	return "\"" + x + "\""
}
