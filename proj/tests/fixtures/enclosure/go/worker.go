package worker

import "sync"

type Pool struct {
	mu   sync.Mutex
	jobs []func()
}

func (p *Pool) Add(job func()) {
	p.mu.Lock()
	defer p.mu.Unlock()
	p.jobs = append(p.jobs, job)
}

func (p *Pool) Run() {
	var wg sync.WaitGroup
	for _, j := range p.jobs {
		wg.Add(1)
		go func(f func()) {
			defer wg.Done()
			f()
		}(j)
	}
	wg.Wait()
}

func (p *Pool) Len() int {
	switch {
	case p == nil:
		return 0
	default:
		return len(p.jobs)
	}
}
