package acme.ledger;

import java.util.ArrayList;
import java.util.List;

public class Ledger {
    private final List<Long> entries = new ArrayList<>();
    private long balance;

    public void post(long amount) {
        if (balance + amount < 0) {
            return;
        }
        entries.add(amount);
        balance += amount;
    }

    public long balance() {
        return balance;
    }

    public List<Long> entries() {
        return entries;
    }
}
