package bank;

import java.util.List;

public class Account {
    private long balance;
    private final String owner;

    public Account(String owner) {
        this.owner = owner;
        this.balance = 0;
    }

    public void deposit(long amount) {
        if (amount <= 0) {
            throw new IllegalArgumentException("amount");
        }
        balance += amount;
    }

    @Override
    public String toString() {
        return owner + ":" + balance;
    }
}
