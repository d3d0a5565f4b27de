package text;

public final class Parser {
    interface Visitor {
        void visit(String token);
    }

    static class Counter implements Visitor {
        int seen;

        public void visit(String token) {
            seen++;
        }
    }

    private static final String SEP = "{";

    public static int count(String input) {
        Counter c = new Counter();
        for (String t : input.split(" ")) {
            c.visit(t);
        }
        return c.seen;
    }
}
