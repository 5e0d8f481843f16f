import java.util.HashMap;
import java.util.Map;

public class Main {
    static int priceOf(Map<String, Integer> prices, String item) {
        if (prices.containsKey(item)) {
            return prices.get(item);
        }
        return 0;
    }
    static int bill(Map<String, Integer> prices) {
        return priceOf(prices, "tea") + priceOf(prices, "mead");
    }
    public static void main(String[] args) {
        Map<String, Integer> prices = new HashMap<>();
        prices.put("tea", 3);
        prices.put("ale", 5);
        System.out.println(bill(prices));
    }
}
