package server

import (
	"fmt"
	"net/http"
)

type Server struct {
	addr  string
	count int
}

func New(addr string) *Server {
	return &Server{addr: addr}
}

func (s *Server) Handle(w http.ResponseWriter, r *http.Request) {
	s.count++
	if r.Method != "GET" {
		http.Error(w, "no", 405)
		return
	}
	fmt.Fprintf(w, "%d", s.count)
}

func (s Server) Addr() string { return s.addr }
