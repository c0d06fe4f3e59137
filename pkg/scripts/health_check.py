#!/usr/bin/env python3
"""Health check script for the Anosov Obstructions API."""

import sys
import time

import httpx

CAT_MAP_COUNTS = [1, 5, 16, 45, 121]


def check_health(base_url: str = "http://localhost:8000", max_retries: int = 5):
    """Check if the API is healthy.

    Args:
        base_url: Server root
        max_retries: Maximum number of retry attempts

    Returns:
        True if healthy, False otherwise
    """
    url = f"{base_url}/health"
    print(f"🔍 Checking API health at {url}...")

    for attempt in range(1, max_retries + 1):
        try:
            response = httpx.get(url, timeout=5)

            if response.status_code == 200:
                data = response.json()
                print("✅ API is healthy!")
                print(f"   Status: {data.get('status')}")
                print(f"   Service: {data.get('service')}")
                return True
            else:
                print(f"⚠️  Attempt {attempt}/{max_retries}: Status code {response.status_code}")

        except httpx.ConnectError:
            print(f"⚠️  Attempt {attempt}/{max_retries}: Connection failed")
        except httpx.TimeoutException:
            print(f"⚠️  Attempt {attempt}/{max_retries}: Request timeout")
        except Exception as e:
            print(f"⚠️  Attempt {attempt}/{max_retries}: {e}")

        if attempt < max_retries:
            print("   Retrying in 2 seconds...")
            time.sleep(2)

    print("❌ API health check failed")
    return False


def check_engine(base_url: str = "http://localhost:8000"):
    """Run the cat-map cross-check through the API and compare with known counts."""
    url = f"{base_url}/api/v1/oracle/cross-check"
    print(f"\n🔍 Checking the engine at {url}...")

    try:
        response = httpx.post(url, json={"matrix": [[2, 1], [1, 1]], "length": len(CAT_MAP_COUNTS)}, timeout=60)
        if response.status_code != 200:
            print(f"⚠️  Status code {response.status_code}: {response.text}")
            return False
        counts = [row["det_count"] for row in response.json()["rows"]]
        if counts != CAT_MAP_COUNTS:
            print(f"❌ Periodic point counts {counts}, expected {CAT_MAP_COUNTS}")
            return False
        print("✅ Engine cross-check passed")
        return True

    except Exception as e:
        print(f"❌ Error: {e}")
        return False


def main():
    base_url = sys.argv[1] if len(sys.argv) > 1 else "http://localhost:8000"
    healthy = check_health(base_url)
    if healthy:
        healthy = check_engine(base_url)
    sys.exit(0 if healthy else 1)


if __name__ == "__main__":
    main()
